"""
Verification suites behind ``invseries verify``.

Each suite is a list of named sections run in a fixed order. A section
returns its result entries and its checks; ``run_suite`` concatenates them
so the report is identical across runs of the same configuration. The
quick suite keeps every section but shrinks the exact-arithmetic sizes.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

import mpmath

from invseries import binomial, family, mfunction, pyramid, soldner, tchain
from invseries.checks import Check, compare_sequences, within
from invseries.config import RunConfig
from invseries.errors import ConsistencyError
from invseries.numerics import mu_root
from invseries.poly import AlphaPoly
from invseries.series import TruncSeries, expm1_series, sin_series

logger = logging.getLogger("invseries")

MU_DIGITS = "1.451369"

# Layers n = 1..6 of the ei pyramid, rows k = 1..n with m = k..n.
APPENDIX_SLICES: dict[int, list[list[int]]] = {
    1: [[1]],
    2: [[1, 1], [1]],
    3: [[1, 2, 2], [3, 3], [1]],
    4: [[1, 3, 6, 6], [7, 14, 11], [6, 6], [1]],
    5: [[1, 4, 12, 24, 24], [15, 45, 70, 50], [25, 50, 35], [10, 10], [1]],
    6: [
        [1, 5, 20, 60, 120, 120],
        [31, 124, 287, 404, 274],
        [90, 270, 375, 225],
        [65, 130, 85],
        [15, 15],
        [1],
    ],
}

FAMILY_PARAMETERS = (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(-1), Fraction(3))
PERIOD_PARAMETERS = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2), Fraction(-1))


@dataclass(frozen=True)
class SuiteSizes:
    binomial_order: int
    random_generators: int
    random_series: int
    roundtrip_series: int
    period_order: int
    pyramid_faces: int
    pyramid_oracle: int
    family_order: int
    family_parameters: tuple[Fraction, ...]
    exploratory_terms: int


QUICK = SuiteSizes(
    binomial_order=8,
    random_generators=2,
    random_series=50,
    roundtrip_series=20,
    period_order=16,
    pyramid_faces=8,
    pyramid_oracle=6,
    family_order=8,
    family_parameters=(Fraction(1), Fraction(1, 2)),
    exploratory_terms=0,
)

FULL = SuiteSizes(
    binomial_order=12,
    random_generators=5,
    random_series=500,
    roundtrip_series=100,
    period_order=25,
    pyramid_faces=12,
    pyramid_oracle=8,
    family_order=12,
    family_parameters=FAMILY_PARAMETERS,
    exploratory_terms=2000,
)

Section = Callable[[RunConfig, SuiteSizes], tuple[list[dict[str, Any]], list[Check]]]


def _consistency(name: str, run: Callable[[], Any]) -> Check:
    # dual-route helpers raise on disagreement; inside a suite that is one failed check
    try:
        run()
    except ConsistencyError as e:
        return Check(name, False, e.errors, {"message": e.message})
    return Check(name, True)


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def soldner_constant(config: RunConfig, sizes: SuiteSizes):
    mu = mu_root(config.prec)
    check = within("verify.mu_digits", mu, mpmath.mpf(MU_DIGITS), mpmath.mpf("1e-6"), printed=MU_DIGITS)
    return [{"name": "mu", "value": mu}], [check]


def soldner_series(config: RunConfig, sizes: SuiteSizes):
    tolerances = {"one": "2e-4", "ln2": "1e-7", "mu_minus_one": "1e-4"}
    results, checks = [], []
    for which, tol in tolerances.items():
        m = soldner.series_theorem21(which, config.terms, config.prec)
        results.append({"name": f"series.{which}", "value": m})
        checks.append(within(f"verify.series_{which}", m.value, m.detail["target"], mpmath.mpf(tol), terms=config.terms))
    m = soldner.series_remark24(config.terms, config.prec)
    results.append({"name": "series.pi2", "value": m})
    checks.append(within("verify.series_pi2", m.value, m.detail["target"], mpmath.mpf("1e-9"), terms=config.terms))

    a = soldner.a_coeffs(config.order)
    checks.append(soldner.sign_check(a))
    checks.extend(soldner.exp_psi_identity(config.order, a))
    checks.append(soldner.scale_invariance_check(config.order))
    return results, checks


def m_pipeline(config: RunConfig, sizes: SuiteSizes):
    special = mfunction.m_special_values(2)
    seq = mfunction.a_polys(2)
    s = AlphaPoly.variable("s")
    checks = [
        Check("verify.m0", special.m0 == Fraction(-13, 18), [], {"m0": special.m0}),
        Check("verify.m0_expansion", mfunction.m0_from_expansion() == special.m0, [], {}),
        Check("verify.a1", seq[1] == s * Fraction(2, 3), [], {"a1": seq[1]}),
        Check("verify.a2", seq[2] == s * (s * 4 + 5) / 18, [], {"a2": seq[2]}),
    ]
    checks.extend(mfunction.a_polys_consistency(mfunction.a_polys(10)))
    routes = mfunction.m_numeric(2, config.terms, config.prec)
    checks.extend(routes.checks())
    return [{"name": "m_of_2", "value": routes}], checks


def pyramid_tables(config: RunConfig, sizes: SuiteSizes):
    table = pyramid.build(sizes.pyramid_faces)
    slices = [
        compare_sequences(f"verify.pyramid_slice_{n}", table.slice(n), rows, n=n)
        for n, rows in APPENDIX_SLICES.items()
    ]
    checks = slices + pyramid.faces_check(table)
    checks.append(_consistency("verify.pyramid_oracle", lambda: pyramid.oracle_check(pyramid.build(sizes.pyramid_oracle))))
    checks.extend(pyramid.p_tables_check(6))
    return [], checks


def periodicity(config: RunConfig, sizes: SuiteSizes):
    order = sizes.period_order
    checks = []
    for p in PERIOD_PARAMETERS:
        period = tchain.find_period(expm1_series(order, p), order=order)
        checks.append(Check(f"verify.period_exp_{p}", period == 2, [], {"p": p, "period": period, "order": order}))
    checks.append(Check("verify.period_x", tchain.find_period(TruncSeries.x(order)) == 1, [], {}))

    rng = random.Random(config.seed)
    periodic = []
    for i in range(sizes.random_series):
        if tchain.find_period(tchain.random_normalized(rng, 16), max_k=8) is not None:
            periodic.append(i)
    checks.append(
        Check("verify.period_random", not periodic, periodic, {"count": sizes.random_series, "seed": config.seed})
    )
    broken = []
    for i in range(sizes.roundtrip_series):
        if not tchain.inverse_roundtrip_check(tchain.random_normalized(rng, 20)).passed:
            broken.append(i)
    checks.append(
        Check("verify.t_roundtrip", not broken, broken, {"count": sizes.roundtrip_series, "order": 20})
    )
    for n in (2, 3, 4):
        for theta in (Fraction(0), Fraction(1, 2), Fraction(2), Fraction(3)):
            for k in (1, 2, 3):
                checks.append(tchain.theta_propagation(n, theta, k))
    checks.extend(tchain.deformed_chain_check(config.order))
    checks.extend(tchain.sinh_chain_check())
    return [], checks


def _generators(config: RunConfig, sizes: SuiteSizes) -> list[tuple[str, TruncSeries]]:
    order = sizes.binomial_order
    x = TruncSeries.x(order)
    gens = [
        ("x", x),
        ("exp", expm1_series(order)),
        ("xexp", tchain.seed_series("xexp", order)),
        ("x-x2", x - x * x),
        ("sin", sin_series(order)),
    ]
    rng = random.Random(config.seed)
    gens.extend((f"random{i}", tchain.random_normalized(rng, order)) for i in range(sizes.random_generators))
    return gens


def binomial_suite(config: RunConfig, sizes: SuiteSizes):
    checks = []
    for name, f in _generators(config, sizes):
        seq = binomial.from_generator(f)
        group = [
            binomial.invariants_check(seq),
            binomial.convolution_check(seq),
            binomial.delta_check(seq),
            binomial.t_check(seq),
            _consistency("binomial.exp_deform", lambda: binomial.exp_deform(seq)),
            binomial.tchain_poly_transform(seq),
        ]
        group.extend(tchain.identities_310(f))
        for c in group:
            c.detail["generator"] = name
        checks.extend(group)
    return [], checks


def family_suite(config: RunConfig, sizes: SuiteSizes):
    checks = []
    for p in sizes.family_parameters:
        fam = family.construct(p, sizes.family_order)
        group = family.family_checks(fam, "all")
        for c in group:
            c.detail.setdefault("p", p)
        checks.extend(group)

    results = []
    for p in (Fraction(1, 2), Fraction(0)):
        m = family.thm44_limit(p, config.prec)
        results.append({"name": f"thm44.{p}", "value": m})
        checks.append(within(f"verify.thm44_{p}", m.value, family.thm44_target(p, config.prec), mpmath.mpf("1e-3"), p=p))
    return results, checks


def integral_checks(config: RunConfig, sizes: SuiteSizes):
    checks = []
    for s in (1, 2):
        for c in soldner.mellin_check(s, config.prec, config.terms):
            checks.append(
                within(f"verify.{c.name.split('.', 1)[1]}", c.detail["value"], c.detail["target"], mpmath.mpf("1e-6"), s=s)
            )
    checks.extend(mfunction.genfunc_checks(10))
    m = mfunction.remark11_limit(config.prec)
    checks.append(within("verify.remark11", m.value, m.detail["target"], mpmath.mpf("1e-3")))
    return [{"name": "remark11", "value": m}], checks


def exploratory(config: RunConfig, sizes: SuiteSizes):
    if not sizes.exploratory_terms:
        return [], []
    checks = soldner.hypothesis_scan(sizes.exploratory_terms, config.prec)
    checks.append(mfunction.residue_zero_scan())
    checks.append(family.remark43_limit(Fraction(1, 2)))
    m = soldner.series_theorem21("ln_mu_conditional", config.terms, config.prec)
    return [{"name": "series.ln_mu_conditional", "value": m}], checks


SECTIONS: tuple[tuple[str, Section], ...] = (
    ("soldner_constant", soldner_constant),
    ("soldner_series", soldner_series),
    ("m_pipeline", m_pipeline),
    ("pyramid", pyramid_tables),
    ("periodicity", periodicity),
    ("binomial", binomial_suite),
    ("family", family_suite),
    ("integrals", integral_checks),
    ("exploratory", exploratory),
)


def run_suite(config: RunConfig, full: bool = False) -> tuple[list[dict[str, Any]], list[Check]]:
    """Run every section in order; results are tagged with their section name."""
    sizes = FULL if full else QUICK
    results: list[dict[str, Any]] = []
    checks: list[Check] = []
    for name, section in SECTIONS:
        section_results, section_checks = section(config, sizes)
        for item in section_results:
            item["section"] = name
        results.extend(section_results)
        checks.extend(section_checks)
        passed = sum(1 for c in section_checks if c.passed)
        logger.info(f"verify[{name}]: {passed}/{len(section_checks)} passed")
    return results, checks
