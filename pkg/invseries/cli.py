"""
invseries CLI.

Every subcommand builds a RunConfig, computes its results and checks, and
prints them as plain text, JSON (validated against the run report schema)
or CSV. Exit codes: 0 all checks passed, 1 a check or an internal
cross-check failed, 2 bad arguments.
"""

from __future__ import annotations

import csv
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import mpmath
import orjson
import typer
from typing_extensions import Annotated

from invseries import binomial, family, mfunction, pyramid, soldner, suites, tchain
from invseries.canonical import encode_scalar, to_jsonable
from invseries.checks import Check, all_passed, compare_series, within
from invseries.config import RunConfig, parse_rational, resolve
from invseries.errors import InvSeriesError, UsageError
from invseries.ledger import append_run, verify_ledger
from invseries.numerics import Measured, digits_for
from invseries.schema import validate_report
from invseries.series import TruncSeries, comp_inverse, comp_inverse_newton, compose, exp, log

logger = logging.getLogger("invseries")

app = typer.Typer(
    name="invseries",
    help="invseries - exact power series, the inverse logarithmic derivative and their numerics",
    add_completion=False,
)

OrderOption = Annotated[Optional[int], typer.Option("--order", "-N", help="Truncation order N (1..64)")]
TermsOption = Annotated[Optional[int], typer.Option("--terms", help="Number of series terms")]
PrecOption = Annotated[Optional[int], typer.Option("--prec", help="Working precision in bits (16..4096)")]
POption = Annotated[Optional[str], typer.Option("--p", help="Rational parameter p, e.g. 1/2")]
FormatOption = Annotated[Optional[str], typer.Option("--format", "-f", help="Output format: plain, json or csv")]
SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Seed for randomized suites")]

_handlers: list[logging.Handler] = []


@dataclass
class Outcome:
    """What a subcommand computed: report entries, checks, text lines and an optional CSV table."""

    results: list[dict[str, Any]] = field(default_factory=list)
    checks: list[Check] = field(default_factory=list)
    lines: list[str] = field(default_factory=list)
    table: tuple[list[str], list[list[Any]]] | None = None


def _setup_logging(verbose: bool, log_file: str | None) -> None:
    """Attach a stream handler and/or a rotating file handler to the invseries logger."""
    from logging.handlers import RotatingFileHandler

    for handler in _handlers:
        logger.removeHandler(handler)
    _handlers.clear()

    formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")
    if verbose:
        handler: logging.Handler = logging.StreamHandler()
        handler.setFormatter(formatter)
        _handlers.append(handler)
    if log_file:
        handler = RotatingFileHandler(log_file, maxBytes=10 * 1024 * 1024, backupCount=3)  # 10 MB
        handler.setFormatter(formatter)
        _handlers.append(handler)
    for handler in _handlers:
        logger.addHandler(handler)
    if _handlers:
        logger.setLevel(logging.DEBUG if verbose else logging.INFO)


@app.callback()
def main(
    verbose: Annotated[bool, typer.Option("--verbose", help="Log progress to stderr")] = False,
    log_file: Annotated[Optional[str], typer.Option("--log-file", help="Append logs to a rotating file")] = None,
):
    """Exact power series, the inverse logarithmic derivative and their numerics."""
    _setup_logging(verbose, log_file)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def build_report(config: RunConfig, outcome: Outcome) -> dict[str, Any]:
    """JSON-ready envelope, validated against the run report schema."""
    checks = [c.to_dict() for c in outcome.checks]
    summary = {"total": len(checks), "passed": sum(1 for c in checks if c["pass"])}
    report = to_jsonable(
        {
            "subcommand": config.subcommand,
            "config": config.to_dict(),
            "results": list(outcome.results) + [{"summary": summary}],
            "checks": checks,
        },
        config.prec,
    )
    validate_report(report)
    return report


def _cell(value: Any, prec: int | None = None) -> str:
    if isinstance(value, (int, str)):
        return str(value)
    encoded = encode_scalar(value, prec)
    return encoded if isinstance(encoded, str) else str(value)


def _measured(m: Measured) -> str:
    return f"{mpmath.nstr(m.value, digits_for(m.prec))} ± {mpmath.nstr(m.error, 3)}"


def _check_line(check: Check) -> str:
    mark = "✓" if check.passed else "✗"
    tag = "  (exploratory)" if check.exploratory else ""
    line = f"{mark} {check.name}{tag}"
    if check.failures:
        shown = ", ".join(str(f) for f in check.failures[:5])
        more = ", ..." if len(check.failures) > 5 else ""
        line += f"  failures: {shown}{more}"
    return line


def _emit(config: RunConfig, outcome: Outcome, report: dict[str, Any]) -> None:
    if config.fmt == "json":
        typer.echo(orjson.dumps(report, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2).decode("utf-8"))
        return
    if config.fmt == "csv":
        if outcome.table is None:
            raise UsageError(f"{config.subcommand}: this output has no table; use --format plain or json")
        header, rows = outcome.table
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(v, config.prec) for v in row] for row in rows)
        typer.echo(buffer.getvalue(), nl=False)
        return
    for line in outcome.lines:
        typer.echo(line)
    if outcome.checks:
        if outcome.lines:
            typer.echo("")
        for check in outcome.checks:
            typer.echo(_check_line(check))
        summary = report["results"][-1]["summary"]
        typer.echo(f"{summary['passed']}/{summary['total']} checks passed")


def _fail(error: InvSeriesError) -> None:
    typer.echo(f"Error: {error.message}", err=True)
    for err in error.errors:
        typer.echo(f"  - {err}", err=True)
    partial = getattr(error, "partial", None)
    if isinstance(partial, Measured):
        typer.echo(f"  partial result: {_measured(partial)}", err=True)


def _run(subcommand: str, flags: dict[str, Any], compute: Callable[[RunConfig], Outcome], record: str | None = None) -> None:
    try:
        config = resolve(subcommand, **flags)
        outcome = compute(config)
        report = build_report(config, outcome)
        _emit(config, outcome, report)
        if record:
            entry = append_run(record, report)
            typer.echo(f"recorded run {entry['seq']} in {record}", err=True)
    except InvSeriesError as e:
        _fail(e)
        raise typer.Exit(e.exit_code)
    if not all_passed(outcome.checks):
        raise typer.Exit(1)


def _coefficient_lines(title: str, s: TruncSeries) -> list[str]:
    return [title] + [f"  x^{n}: {c}" for n, c in enumerate(s.coeffs)]


def _coefficient_table(s: TruncSeries) -> tuple[list[str], list[list[Any]]]:
    return ["n", "value"], [[n, c] for n, c in enumerate(s.coeffs)]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

SERIES_OPS = ("show", "inverse", "t", "tinv", "exp", "log")


@app.command()
def series(
    fn: Annotated[str, typer.Option("--fn", help=f"Seed series: {', '.join(sorted(tchain.SEEDS))}")] = "exp",
    op: Annotated[str, typer.Option("--op", help=f"Operation: {', '.join(SERIES_OPS)}")] = "inverse",
    order: OrderOption = None,
    p: POption = None,
    fmt: FormatOption = None,
):
    """
    Apply a series operation to a named seed.

    ``log`` acts on f/x, the unit-constant part of the seed.
    """

    def compute(config: RunConfig) -> Outcome:
        if op not in SERIES_OPS:
            raise UsageError(f"unknown operation {op!r}", [f"choose from {', '.join(SERIES_OPS)}"])
        f = tchain.seed_series(fn, config.order, config.p)
        checks: list[Check] = []
        if op == "show":
            out = f
        elif op == "inverse":
            out = comp_inverse(f)
            checks = [
                compare_series("series.inverse_compose", compose(f, out), TruncSeries.x(config.order)),
                compare_series("series.inverse_newton", comp_inverse_newton(f), out),
            ]
        elif op in ("t", "tinv"):
            out = tchain.t_apply(f) if op == "t" else tchain.t_inverse(f)
            checks = [tchain.inverse_roundtrip_check(f)]
        elif op == "exp":
            out = exp(f)
            checks = [compare_series("series.log_of_exp", log(out), f)]
        else:
            unit = f.shift_down()
            out = log(unit)
            checks = [compare_series("series.exp_of_log", exp(out), unit)]
        return Outcome(
            results=[{"fn": fn, "op": op, "series": out}],
            checks=checks,
            lines=_coefficient_lines(f"{op}({fn}), p = {config.p}, order {out.order}:", out),
            table=_coefficient_table(out),
        )

    _run("series", {"order": order, "p": p, "fmt": fmt}, compute)


@app.command()
def binom(
    gen: Annotated[str, typer.Option("--gen", help=f"Generator: {', '.join(sorted(tchain.SEEDS))}")] = "exp",
    deform_a: Annotated[str, typer.Option("--deform-a", help="Constant A of the log-deformation series")] = "1",
    order: OrderOption = None,
    p: POption = None,
    fmt: FormatOption = None,
):
    """
    Binomial-type sequence p_n(α) of a generator, with its identity suite.
    """

    def compute(config: RunConfig) -> Outcome:
        f = tchain.seed_series(gen, config.order, config.p)
        seq = binomial.from_generator(f)
        checks = [
            binomial.invariants_check(seq),
            binomial.convolution_check(seq),
            binomial.delta_check(seq),
            binomial.t_check(seq),
            binomial.tchain_poly_transform(seq),
        ]
        deformed = binomial.exp_deform(seq)
        checks.extend(tchain.identities_310(f))
        _, log_check = binomial.log_deform_series(seq, parse_rational(deform_a))
        checks.append(log_check)
        lines = [f"binomial sequence of {gen}, p = {config.p}:"]
        lines += [f"  p_{n}(α) = {poly}" for n, poly in enumerate(seq.polys)]
        return Outcome(
            results=[{"generator": gen, "sequence": seq, "deformed": deformed.polys}],
            checks=checks,
            lines=lines,
            table=(["n", "value"], [[n, str(poly)] for n, poly in enumerate(seq.polys)]),
        )

    _run("binom", {"order": order, "p": p, "fmt": fmt}, compute)


@app.command("tchain")
def tchain_command(
    seed_fn: Annotated[str, typer.Option("--seed-fn", help=f"Seed: {', '.join(sorted(tchain.SEEDS))}")] = "exp",
    k: Annotated[int, typer.Option("--k", help="Chain length; negative values apply the inverse")] = 2,
    find_period: Annotated[bool, typer.Option("--find-period", help="Report the least period instead of the chain")] = False,
    max_k: Annotated[int, typer.Option("--max-k", help=f"Largest period tried (at most {tchain.MAX_CHAIN})")] = 8,
    order: OrderOption = None,
    p: POption = None,
    fmt: FormatOption = None,
):
    """
    Iterate the inverse logarithmic derivative on a seed, or find its period.
    """

    def compute(config: RunConfig) -> Outcome:
        f = tchain.seed_series(seed_fn, config.order, config.p)
        if find_period:
            period = tchain.find_period(f, max_k, config.order)
            shown = "none" if period is None else str(period)
            return Outcome(
                results=[{"seed": seed_fn, "p": config.p, "max_k": max_k, "period": period}],
                checks=[tchain.parity_check(f, 2)],
                lines=[f"period = {shown}"],
            )
        state = tchain.chain(f, k)
        lines = []
        for power, link in zip(state.powers, state.links):
            lines += _coefficient_lines(f"T^{power}({seed_fn}):", link)
        return Outcome(
            results=[{"seed": seed_fn, "p": config.p, "chain": state}],
            checks=[tchain.inverse_roundtrip_check(f), tchain.parity_check(f, k), tchain.rescaling_check(f, 2)],
            lines=lines,
            table=_coefficient_table(state.links[-1]),
        )

    _run("tchain", {"order": order, "p": p, "fmt": fmt}, compute)


SERIES_ALIASES = {
    "lnmu": "ln_mu_conditional",
    "mu1": "mu_minus_one",
    "one": "one",
    "ln2": "ln2",
    "pi2": "pi2",
}
# tolerances at the default 10^4 terms; twice the reported tail bound is used when larger
SERIES_TOLERANCES = {"mu1": "1e-4", "one": "2e-4", "ln2": "1e-7", "pi2": "1e-9"}


@app.command("soldner")
def soldner_command(
    series_kind: Annotated[Optional[str], typer.Option("--series", help="lnmu, mu1, one, ln2 or pi2")] = None,
    count: Annotated[int, typer.Option("--count", help="Rows of the coefficient table")] = 12,
    mellin: Annotated[Optional[int], typer.Option("--mellin", help="Series against quadrature at s = 1 or 2")] = None,
    hypotheses: Annotated[bool, typer.Option("--hypotheses", help="Exploratory scans of b_n")] = False,
    terms: TermsOption = None,
    prec: PrecOption = None,
    fmt: FormatOption = None,
):
    """
    Coefficients a_n and b_n = |a_n|·e^{−γn}, and the series they sum to.

    Without options a coefficient table is printed; CSV columns are n,a_n,b_n.
    """

    def compute(config: RunConfig) -> Outcome:
        if series_kind is not None:
            return _soldner_series(config, series_kind)
        if mellin is not None:
            checks = soldner.mellin_check(mellin, config.prec, config.terms)
            return Outcome(checks=checks, lines=[f"Mellin identities at s = {mellin}, {config.terms} terms"])
        if hypotheses:
            checks = soldner.hypothesis_scan(config.terms, config.prec)
            return Outcome(checks=checks, lines=[f"exploratory scans over {config.terms} terms"])

        table = soldner.soldner_table(count, config.prec)
        checks = [soldner.sign_check(table.a)]
        checks.extend(soldner.exp_psi_identity(min(count, soldner.CROSS_CHECK_ORDER), table.a))
        checks.append(soldner.scale_invariance_check(min(count, soldner.CROSS_CHECK_ORDER)))
        rows = [[r["n"], r["a_n"], r["b_n"]] for r in table.rows()]
        lines = [f"{n:>5}  {_cell(a):>28}  {mpmath.nstr(b, 20)}" for n, a, b in rows]
        return Outcome(
            results=[{"table": table}],
            checks=checks,
            lines=[f"{'n':>5}  {'a_n':>28}  b_n"] + lines,
            table=(["n", "a_n", "b_n"], rows),
        )

    _run("soldner", {"terms": terms, "prec": prec, "fmt": fmt}, compute)


def _soldner_series(config: RunConfig, kind: str) -> Outcome:
    if kind not in SERIES_ALIASES:
        raise UsageError(f"unknown series {kind!r}", [f"choose from {', '.join(SERIES_ALIASES)}"])
    if kind == "pi2":
        m = soldner.series_remark24(config.terms, config.prec)
    else:
        m = soldner.series_theorem21(SERIES_ALIASES[kind], config.terms, config.prec)
    target = m.detail["target"]
    if kind == "lnmu":
        check = Check("soldner.series_lnmu", True, [], {"target": target, "diff": m.detail["diff"]}, exploratory=True)
    else:
        tol = max(mpmath.mpf(SERIES_TOLERANCES[kind]), 2 * m.error)
        check = within(f"soldner.series_{kind}", m.value, target, tol, terms=config.terms)
    lines = [
        f"{kind}: {_measured(m)}",
        f"  target {mpmath.nstr(target, digits_for(config.prec))}, |diff| {mpmath.nstr(m.detail['diff'], 3)}",
    ]
    return Outcome(results=[{"series": kind, "value": m}], checks=[check], lines=lines)


@app.command()
def mfun(
    s: Annotated[Optional[str], typer.Option("--s", help="Evaluate M(s) at a rational s > 1")] = None,
    special: Annotated[Optional[int], typer.Option("--special", help="Exact values M(0), M(−N) for N up to this")] = None,
    check_integrals: Annotated[bool, typer.Option("--check-integrals", help="Compare the series with both integrals")] = False,
    limit: Annotated[bool, typer.Option("--limit", help="The limit 1 − ½·ln 2 through Lambert W")] = False,
    order: OrderOption = None,
    terms: TermsOption = None,
    prec: PrecOption = None,
    fmt: FormatOption = None,
):
    """
    M(s) and the A_k(s) polynomials.

    Without options the A_k(s) table to the given order is printed.
    """

    def compute(config: RunConfig) -> Outcome:
        outcome = Outcome()
        if special is not None:
            values = mfunction.m_special_values(special)
            outcome.results.append({"special": values})
            outcome.checks.append(
                Check("mfun.m0_routes", values.m0 == mfunction.m0_from_expansion(), [], {"m0": values.m0})
            )
            outcome.checks.append(mfunction.residue_zero_scan(special))
            outcome.lines.append(f"M(0) = {values.m0}")
            outcome.lines += [f"M(-{n}) = {v}" for n, v in values.m_neg.items()]
            outcome.lines += [f"residue at s = {1 - 2 * n}/2: {v}·sqrt(2/pi)" for n, v in values.half_residues.items()]
        if s is not None or check_integrals:
            point = parse_rational(s) if s is not None else 2
            if check_integrals:
                routes = mfunction.m_numeric(point, config.terms, config.prec)
                outcome.results.append({"m": routes})
                outcome.checks.extend(routes.checks())
                outcome.lines += [
                    f"M({point}) series          {_measured(routes.series)}",
                    f"M({point}) first integral  {_measured(routes.first)}",
                    f"M({point}) second integral {_measured(routes.second)}",
                ]
            else:
                m = mfunction.m_series(point, config.terms, config.prec)
                outcome.results.append({"s": point, "m": m})
                outcome.lines.append(f"M({point}) = {_measured(m)}")
        if limit:
            m = mfunction.remark11_limit(config.prec)
            outcome.results.append({"limit": m})
            outcome.checks.append(within("mfun.limit", m.value, m.detail["target"], mpmath.mpf("1e-3")))
            outcome.lines.append(f"limit = {_measured(m)}")
        if outcome.results:
            return outcome

        seq = mfunction.a_polys(config.order)
        outcome.results.append({"a_polys": seq})
        outcome.checks.extend(mfunction.a_polys_consistency(seq))
        outcome.checks.extend(mfunction.genfunc_checks(config.order))
        outcome.lines += [f"A_{k}(s) = {poly}" for k, poly in enumerate(seq.polys)]
        outcome.table = (["n", "value"], [[k, str(poly)] for k, poly in enumerate(seq.polys)])
        return outcome

    _run("mfun", {"order": order, "terms": terms, "prec": prec, "fmt": fmt}, compute)


@app.command("pyramid")
def pyramid_command(
    n: Annotated[int, typer.Option("--n", help="Number of layers")] = 6,
    p: Annotated[Optional[str], typer.Option("--p", help="Evaluate the p-table at this rational")] = None,
    variant: Annotated[str, typer.Option("--variant", help="a: e^{kx} basis, b: Δ_p basis")] = "a",
    fmt: FormatOption = None,
):
    """
    The number pyramid, layer by layer.

    Without --p and with variant a this is the e^{αEi(x)} pyramid.
    """

    def compute(config: RunConfig) -> Outcome:
        if variant not in ("a", "b"):
            raise UsageError(f"unknown variant {variant!r}", ["use 'a' or 'b'"])
        oracle_depth = min(n, pyramid.MAX_ORACLE)
        if p is None and variant == "a":
            table = pyramid.build(n)
            checks = pyramid.faces_check(table) + [pyramid.oracle_check(table)]
        else:
            a_table, b_table = pyramid.build_p(n)
            table = a_table if variant == "a" else b_table
            if p is None:
                checks = pyramid.p_tables_check(oracle_depth)
            else:
                point = parse_rational(p)
                table = table.evaluate(point)
                checks = pyramid.p_tables_check(oracle_depth, samples=(point,))
        rows = [
            [layer, k, m, table.entry(layer, k, m)]
            for layer in range(1, n + 1)
            for k in range(1, layer + 1)
            for m in range(k, layer + 1)
        ]
        return Outcome(
            results=[{"n": n, "variant": variant, "p": p, "table": table}],
            checks=checks,
            lines=[pyramid.render_slice(table, layer) for layer in range(1, n + 1)],
            table=(["n", "k", "m", "value"], rows),
        )

    _run("pyramid", {"p": p, "fmt": fmt}, compute)


@app.command("family")
def family_command(
    check: Annotated[str, typer.Option("--check", help="41, 42, 43, 44, 45, obs or all")] = "all",
    order: OrderOption = None,
    p: POption = None,
    prec: PrecOption = None,
    fmt: FormatOption = None,
):
    """
    The p-family Δ_p, y_p, γ_p, ω_p, T_p, Ψ_p and its identities.
    """

    def compute(config: RunConfig) -> Outcome:
        fam = family.construct(config.p, config.order)
        checks = family.family_checks(fam, check, config.prec)
        members = fam.members()
        lines = [f"p = {fam.p}, order {fam.order}"]
        for name, member in members.items():
            shown = ", ".join(str(c) for c in member.coeffs[:6])
            lines.append(f"  {name}: [{shown}{', ...' if member.order > 5 else ''}]")
        header = ["n"] + list(members)
        rows = [[j] + [member[j] for member in members.values()] for j in range(fam.order + 1)]
        return Outcome(results=[{"family": fam, "check": check}], checks=checks, lines=lines, table=(header, rows))

    _run("family", {"order": order, "p": p, "prec": prec, "fmt": fmt}, compute)


@app.command()
def verify(
    full: Annotated[bool, typer.Option("--full/--quick", help="Full acceptance sizes, or the quick subset")] = False,
    record: Annotated[Optional[str], typer.Option("--record", help="Append this run to a ledger file")] = None,
    check_ledger: Annotated[Optional[str], typer.Option("--check-ledger", help="Verify a ledger's hash chain")] = None,
    order: OrderOption = None,
    terms: TermsOption = None,
    prec: PrecOption = None,
    seed: SeedOption = None,
    fmt: FormatOption = None,
):
    """
    Run the acceptance suite.

    Exits non-zero when any non-exploratory check fails. With --check-ledger
    only the ledger is verified.
    """
    if check_ledger:
        _verify_ledger(check_ledger)
        return

    def compute(config: RunConfig) -> Outcome:
        results, checks = suites.run_suite(config, full=full)
        results.insert(0, {"suite": "full" if full else "quick"})
        lines = [f"verify ({'full' if full else 'quick'}), seed {config.seed}"]
        return Outcome(results=results, checks=checks, lines=lines)

    flags = {"order": order, "terms": terms, "prec": prec, "seed": seed, "fmt": fmt}
    _run("verify", flags, compute, record=record)


def _verify_ledger(path: str) -> None:
    if not Path(path).exists():
        typer.echo(f"Error: Ledger not found: {path}", err=True)
        raise typer.Exit(1)

    result = verify_ledger(path)
    typer.echo("=" * 50)
    typer.echo("INVSERIES LEDGER VERIFICATION")
    typer.echo("=" * 50)
    typer.echo(f"Ledger: {path}")
    typer.echo(f"Records checked: {result['checked_records']}")
    typer.echo(f"Head hash: {result['head_hash'][:32]}..." if result["head_hash"] else "Head hash: (empty)")
    typer.echo("")
    if result["ok"]:
        typer.echo("✓ Ledger verification PASSED")
    else:
        typer.echo("✗ Ledger verification FAILED")
        typer.echo(f"  Error: {result['error']}")
        raise typer.Exit(1)


if __name__ == "__main__":
    app()
