"""
Coefficients of ψ, the compositional inverse of x·exp(∫₀ˣ (e^t − 1)/t dt),
and the series built from them.

a_n are exact rationals from the quadratic recurrence
(1 − n)·a_n = Σ (n−k)/k · a_k·a_{n−k}. The positive numbers
b_n = (−1)^{n−1}·a_n·e^{−γn} satisfy the same recurrence up to sign and
are computed directly in fixed point for large n.
"""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any

import mpmath

from invseries.checks import Check, compare_sequences, within
from invseries.errors import ConsistencyError, UsageError
from invseries.numerics import DEFAULT_PREC, Measured, constants, eval_series, mu_root, quad, ei, to_mpf
from invseries.series import TruncSeries, comp_inverse, composition_sum, exp, exp_series, expm1_series
from invseries.tchain import t_apply, t_inverse

logger = logging.getLogger("invseries")

CROSS_CHECK_ORDER = 12
SERIES_KINDS = ("ln_mu_conditional", "mu_minus_one", "one", "ln2")


@dataclass
class SoldnerCoeffs:
    """a_1..a_M exact and b_1..b_N at ``prec`` bits (M ≤ N)."""

    a: list[Fraction]
    b: list[mpmath.mpf]
    prec: int

    def rows(self) -> list[dict[str, Any]]:
        out = []
        for n, b in enumerate(self.b, start=1):
            a = self.a[n - 1] if n <= len(self.a) else ""
            out.append({"n": n, "a_n": a, "b_n": b})
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"prec": self.prec, "rows": self.rows()}


# ---------------------------------------------------------------------------
# Exact coefficients
# ---------------------------------------------------------------------------


def _recurrence(count: int) -> list[Fraction]:
    a = [Fraction(1)]
    for n in range(2, count + 1):
        total = sum(
            (Fraction(n - k, k) * a[k - 1] * a[n - k - 1] for k in range(1, n)),
            Fraction(0),
        )
        a.append(total / (1 - n))
    return a


def _log_integral_weight(m: int) -> Fraction:
    return Fraction(1, m * factorial(m))


def exact_formula(n: int) -> Fraction:
    """a_n = (1/n)·Σ_{k<n} (−n)^k/k! · Σ over compositions of n−1 into k parts of Π 1/(m·m!)."""
    total = sum(
        (
            Fraction((-n) ** k, factorial(k)) * composition_sum(_log_integral_weight, n - 1, k)
            for k in range(n)
        ),
        Fraction(0),
    )
    return total / n


def integral_exp_series(order: int) -> TruncSeries:
    """x·exp(∫₀ˣ (e^t − 1)/t dt)."""
    inner = expm1_series(order).shift_down().integrate()
    return exp(inner).shift_up().truncate(order)


def lagrange_coeffs(order: int) -> list[Fraction]:
    return list(comp_inverse(integral_exp_series(order)).coeffs[1:])


def a_coeffs(count: int) -> list[Fraction]:
    """a_1..a_count; the first twelve are confirmed by two independent routes."""
    if count < 1:
        raise UsageError("a_coeffs needs at least one term")
    a = _recurrence(count)
    m = min(count, CROSS_CHECK_ORDER)
    by_formula = [exact_formula(n) for n in range(1, m + 1)]
    by_lagrange = lagrange_coeffs(m)
    failures = [
        n for n in range(1, m + 1) if not (a[n - 1] == by_formula[n - 1] == by_lagrange[n - 1])
    ]
    if failures:
        raise ConsistencyError("a_n routes disagree", [f"n = {n}" for n in failures])
    logger.info(f"a_coeffs: {count} terms, cross-checked to n = {m}")
    return a


def psi_series(a: list[Fraction]) -> TruncSeries:
    return TruncSeries([Fraction(0)] + list(a))


def sign_check(a: list[Fraction]) -> Check:
    """(−1)^{n−1}·a_n > 0."""
    failures = [n for n, c in enumerate(a, start=1) if (-1) ** (n - 1) * c <= 0]
    return Check("soldner.sign_alternation", not failures, failures, {"terms": len(a)})


def exp_psi_identity(order: int, a: list[Fraction] | None = None) -> list[Check]:
    """
    exp(ψ) − 1 = Σ (a_n/n)·xⁿ, plus the round trip through 𝔗⁻¹:
    𝔗⁻¹(x·e^{−x}) is ψ^{inv}.
    """
    a = a_coeffs(order) if a is None else list(a)[:order]
    psi = psi_series(a)
    lhs = exp(psi)
    checks = [
        compare_sequences(
            "soldner.exp_psi",
            lhs.coeffs[1:],
            [c / n for n, c in enumerate(a, start=1)],
            start=1,
            order=order,
        )
    ]
    xexp = TruncSeries.x(order) * exp_series(order, -1)
    lifted = t_inverse(xexp)
    checks.append(compare_sequences("soldner.t_inverse_roundtrip", t_apply(lifted).coeffs, xexp.coeffs))
    checks.append(compare_sequences("soldner.psi_from_t_inverse", comp_inverse(lifted).coeffs, psi.coeffs))
    return checks


def scale_invariance_check(order: int = 12, c=2) -> Check:
    """The recurrence still holds after a_n → a_n·Cⁿ for rational C."""
    c = Fraction(c)
    scaled = [an * c**n for n, an in enumerate(a_coeffs(order), start=1)]
    failures = []
    for n in range(2, order + 1):
        rhs = sum((Fraction(n - k, k) * scaled[k - 1] * scaled[n - k - 1] for k in range(1, n)), Fraction(0))
        if (1 - n) * scaled[n - 1] != rhs:
            failures.append(n)
    return Check("soldner.scale_invariance", not failures, failures, {"c": c, "order": order})


# ---------------------------------------------------------------------------
# b_n
# ---------------------------------------------------------------------------


def _guard_bits(count: int) -> int:
    return 32 + 2 * max(1, count.bit_length())


@lru_cache(maxsize=8)
def _b_fixed_point(count: int, prec: int) -> tuple[int, ...]:
    # b_n·2^W as integers, from (n−1)·b_n = n·Σ (b_k/k)·b_{n−k} − Σ b_k·b_{n−k}
    width = prec + _guard_bits(count)
    scale = 1 << width
    with mpmath.workprec(width + 20):
        b1 = int(mpmath.nint(mpmath.exp(-constants(prec).gamma) * scale))
    big = [0, b1]
    small = [0, b1]
    for n in range(2, count + 1):
        tail = big[n - 1:0:-1]
        weighted = sum(map(operator.mul, small[1:n], tail))
        plain = sum(map(operator.mul, big[1:n], tail))
        value = (n * weighted - plain) // ((n - 1) * scale)
        big.append(value)
        small.append(value // n)
    return tuple(big)


def b_coeffs(count: int, prec: int = DEFAULT_PREC, cross_check: int = 40) -> list[mpmath.mpf]:
    """
    b_1..b_count, all positive.

    The first ``cross_check`` values are compared with |a_n|·e^{−γn} from
    the exact rationals; relative error stays below 2^{−prec+log2 n}.
    """
    if count < 1:
        raise UsageError("b_coeffs needs at least one term")
    width = prec + _guard_bits(count)
    raw = _b_fixed_point(count, prec)
    with mpmath.workprec(prec + 20):
        b = [mpmath.ldexp(mpmath.mpf(v), -width) for v in raw[1:]]
        m = min(count, cross_check)
        if m:
            decay = mpmath.exp(-constants(prec).gamma)
            tol = mpmath.mpf(2) ** (16 - prec)
            bad = []
            power = mpmath.mpf(1)
            for n, an in enumerate(_recurrence(m), start=1):
                power *= decay
                exact = abs(to_mpf(an)) * power
                if abs(b[n - 1] - exact) > tol * exact:
                    bad.append(n)
            if bad:
                raise ConsistencyError("fixed-point b_n disagree with exact a_n", [f"n = {n}" for n in bad])
    nonpositive = [n for n, v in enumerate(b, start=1) if v <= 0]
    if nonpositive:
        raise ConsistencyError("b_n lost positivity", [f"n = {n}" for n in nonpositive[:10]])
    logger.info(f"b_coeffs: {count} terms at {prec} bits")
    return b


def soldner_table(count: int, prec: int = DEFAULT_PREC, exact_terms: int = 60) -> SoldnerCoeffs:
    return SoldnerCoeffs(a=a_coeffs(min(count, exact_terms)), b=b_coeffs(count, prec), prec=prec)


# ---------------------------------------------------------------------------
# Series identities
# ---------------------------------------------------------------------------


def _target(which: str, prec: int) -> mpmath.mpf:
    consts = constants(prec)
    if which == "one":
        return mpmath.mpf(1)
    if which == "ln2":
        return consts.ln2
    if which == "mu_minus_one":
        return mu_root(prec) - 1
    return mpmath.log(mu_root(prec))


def series_theorem21(which: str, terms: int = 10000, prec: int = DEFAULT_PREC) -> Measured:
    """
    Partial sums of the b_n series:

    - ``one``: Σ b_n/n = 1
    - ``ln2``: Σ b_n/n² = ln 2
    - ``mu_minus_one``: Σ (−1)^{n−1} b_n/n = μ − 1 (alternating, Euler tail)
    - ``ln_mu_conditional``: Σ (−1)^{n−1} b_n, whose convergence to ln μ is
      not known; plain, Cesàro and Euler values are reported side by side.
    """
    if which not in SERIES_KINDS:
        raise UsageError(f"unknown series {which!r}", [f"choose from {', '.join(SERIES_KINDS)}"])
    b = b_coeffs(terms, prec)
    with mpmath.workprec(prec + 20):
        target = _target(which, prec)
        detail: dict[str, Any] = {"which": which, "terms": terms, "target": target}
        if which in ("one", "ln2"):
            power = 1 if which == "one" else 2
            value = mpmath.fsum(bn / mpmath.mpf(n) ** power for n, bn in enumerate(b, start=1))
            # n·b_n < 1 numerically, so the tail is below Σ_{n>N} n^{−power−1}
            error = b[-1] * terms / (power * mpmath.mpf(terms) ** power)
        elif which == "mu_minus_one":
            coeffs = [0] + [(-1) ** (n - 1) * bn / n for n, bn in enumerate(b, start=1)]
            result = eval_series(coeffs, 1, prec, mode="euler", tail_terms=min(64, terms))
            value, error = result.value, result.error + b[-1] / terms
        else:
            coeffs = [0] + [(-1) ** (n - 1) * bn for n, bn in enumerate(b, start=1)]
            plain = eval_series(coeffs, 1, prec, mode="plain")
            cesaro = eval_series(coeffs, 1, prec, mode="cesaro")
            euler = eval_series(coeffs, 1, prec, mode="euler", tail_terms=min(64, terms))
            detail.update({"plain": plain.value, "cesaro": cesaro.value, "euler": euler.value, "exploratory": True})
            value = cesaro.value
            error = abs(plain.value - cesaro.value)
        detail["diff"] = abs(value - target)
    logger.info(f"series_theorem21[{which}]: {mpmath.nstr(value, 12)} with {terms} terms")
    return Measured(value, error, prec, detail)


def remark24_rhs(prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """π²/6 − Σ_{n≥0} 1/(4ⁿ·(2n+1)²), the geometric sum run to 2^{−prec−10}."""
    with mpmath.workprec(prec + 20):
        eps = mpmath.mpf(2) ** (-(prec + 10))
        total = mpmath.mpf(0)
        n = 0
        while True:
            term = 1 / (mpmath.mpf(4) ** n * (2 * n + 1) ** 2)
            total += term
            if term < eps:
                break
            n += 1
        return constants(prec).pi ** 2 / 6 - total


def series_remark24(terms: int = 10000, prec: int = DEFAULT_PREC) -> Measured:
    """Σ b_n/n³ against its closed form; the value is the partial sum."""
    b = b_coeffs(terms, prec)
    with mpmath.workprec(prec + 20):
        value = mpmath.fsum(bn / mpmath.mpf(n) ** 3 for n, bn in enumerate(b, start=1))
        error = b[-1] * terms / (3 * mpmath.mpf(terms) ** 3)
        rhs = remark24_rhs(prec)
        detail = {"terms": terms, "target": rhs, "diff": abs(value - rhs)}
    return Measured(value, error, prec, detail)


def hypothesis_scan(count: int = 2000, prec: int = DEFAULT_PREC) -> list[Check]:
    """
    Exploratory scans of the b_n sequence: monotone decrease, the trend of
    n·b_n, and the Cesàro mean (1/N)·Σ k·b_k. Nothing here is a theorem.
    """
    b = b_coeffs(count, prec)
    with mpmath.workprec(prec + 20):
        decreasing = [n for n in range(1, count) if not b[n - 1] > b[n]]
        scaled = [n * bn for n, bn in enumerate(b, start=1)]
        not_increasing = [n for n in range(1, count) if not scaled[n - 1] < scaled[n]]
        cesaro = mpmath.fsum(scaled) / count
        last = scaled[-1]
        checkpoints = {
            str(n): scaled[n - 1] for n in (10, 100, 1000, 2000, 5000, 10000) if n <= count
        }
    return [
        Check("soldner.b_decreasing", not decreasing, decreasing[:20], {"terms": count}, exploratory=True),
        Check(
            "soldner.nb_n_increasing",
            not not_increasing,
            not_increasing[:20],
            {"terms": count, "last": last, "checkpoints": checkpoints, "in_0.9_1": bool(0.9 < last < 1)},
            exploratory=True,
        ),
        Check(
            "soldner.cesaro_mean",
            bool(abs(cesaro - 1) < mpmath.mpf("0.05")),
            [],
            {"terms": count, "mean": cesaro, "distance": abs(cesaro - 1)},
            exploratory=True,
        ),
    ]


def _positive_tail(b: list[mpmath.mpf], s: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """
    Σ_{n>N} b_n/n^s under the model n·b_n ≈ 1 − c/ln n, with c fitted at
    n = N. The bound is the size of the c-correction itself.
    """
    n_terms = len(b)
    big_n = mpmath.mpf(n_terms)
    c = (1 - big_n * b[-1]) * mpmath.log(big_n)
    # Σ_{n>N} 1/(n^{s+1}·ln n) by the midpoint rule on [N + ½, ∞)
    log_part = mpmath.quad(lambda x: 1 / (x ** (s + 1) * mpmath.log(x)), [big_n + mpmath.mpf(1) / 2, mpmath.inf])
    tail = mpmath.zeta(s + 1, n_terms + 1) - c * log_part
    return tail, abs(c * log_part)


def mellin_check(s: int, prec: int = DEFAULT_PREC, terms: int = 10000) -> list[Check]:
    """
    Γ(s+1)·Σ b_n/n^s = ∫₀^∞ (−Ei(−x))^s dx and
    Γ(s+1)·Σ (−1)^{n−1} b_n/n^s = ∫₀^{ln μ} (−Ei(x))^s dx.

    Agreement is judged against the composed bound: series tail plus the
    quadrature error estimate.
    """
    if s not in (1, 2):
        raise UsageError(f"mellin_check supports s in {{1, 2}}, got {s}")
    b = b_coeffs(terms, prec)
    with mpmath.workprec(prec + 20):
        weight = mpmath.gamma(s + 1)
        positive = weight * mpmath.fsum(bn / mpmath.mpf(n) ** s for n, bn in enumerate(b, start=1))
        alternating = weight * mpmath.fsum(
            (-1) ** (n - 1) * bn / mpmath.mpf(n) ** s for n, bn in enumerate(b, start=1)
        )
        n_terms = mpmath.mpf(terms)
        tail, tail_bound = _positive_tail(b, s)
        positive += weight * tail
        positive_tail = weight * tail_bound
        alternating_tail = weight / n_terms ** (s + 1)

        lower = quad(lambda x: (-ei(-x, prec)) ** s, 0, mpmath.inf, prec)
        upper = quad(lambda x: (-ei(x, prec)) ** s, 0, mpmath.log(mu_root(prec)), prec)
        slack = mpmath.mpf(2) ** (-(prec // 2))
        return [
            within(
                f"soldner.mellin_positive_s{s}",
                positive,
                lower.value,
                positive_tail + lower.error + slack,
                s=s,
                terms=terms,
            ),
            within(
                f"soldner.mellin_alternating_s{s}",
                alternating,
                upper.value,
                alternating_tail + upper.error + slack,
                s=s,
                terms=terms,
            ),
        ]
