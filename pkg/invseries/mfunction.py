"""
M(s) = Σ e^{−n}/n^s · Σ_{k≤n} n^k/k! and the A_k(s) polynomials.

Exact parts work over Q and Q[s]. Numeric parts use mpmath: the defining
series with an asymptotic tail, the two integral representations, and the
limit 1 − ½·ln 2 approached through the principal Lambert W.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Any

import mpmath

from invseries.checks import Check, compare_sequences, within
from invseries.errors import DomainError, UsageError
from invseries.numerics import DEFAULT_PREC, Measured, constants, lambert_w, quad, richardson, to_mpf
from invseries.poly import AlphaPoly
from invseries.series import TruncSeries, comp_inverse, div, exp_series, log, pow_scalar

logger = logging.getLogger("invseries")

MAX_SPECIAL = 8
_LADDER_LIMIT = 1000


def partial_exp_sum(n: int) -> Fraction:
    """Σ_{k=0}^{n} n^k/k!."""
    if n < 0:
        raise UsageError("partial_exp_sum needs n >= 0")
    total = Fraction(0)
    term = Fraction(1)
    for k in range(n + 1):
        if k:
            term = term * n / k
        total += term
    return total


def lambert_series(order: int) -> TruncSeries:
    """W(x) = (x·e^x)^{inv}."""
    return comp_inverse(TruncSeries.x(order) * exp_series(order))


def genfunc_checks(order: int = 10) -> list[Check]:
    """
    Σ xⁿ·Σ_{k≤n} n^k/k! = 1/(1 + W(−x))² and
    Σ (xⁿ/n)·Σ_{k≤n} n^k/k! = −W(−x) − ln(1 + W(−x)).
    """
    w = lambert_series(order).rescale(-1)
    one = TruncSeries.one(order)
    sums = [partial_exp_sum(n) for n in range(order + 1)]

    squared = div(one, (one + w) ** 2)
    checks = [compare_sequences("mfun.genfunc_square", sums, squared.coeffs, order=order)]

    logarithmic = -w - log(one + w)
    expected = [Fraction(0)] + [c / n for n, c in enumerate(sums[1:], start=1)]
    checks.append(compare_sequences("mfun.genfunc_log", expected, logarithmic.coeffs, order=order))
    return checks


# ---------------------------------------------------------------------------
# A_k(s)
# ---------------------------------------------------------------------------


def base_series(order: int) -> TruncSeries:
    """(−t − ln(1−t))/(t²/2) = Σ 2t^j/(j+2)."""
    return TruncSeries.from_function(lambda j: Fraction(2, j + 2), order)


@dataclass
class APolySequence:
    """A_0(s)..A_K(s) with [(−t − ln(1−t))/(t²/2)]^s = Σ A_k(s)·t^k."""

    polys: list[AlphaPoly]

    def __getitem__(self, k: int) -> AlphaPoly:
        return self.polys[k]

    def __len__(self) -> int:
        return len(self.polys)

    def to_dict(self) -> dict[str, Any]:
        return {"polys": [{"k": k, "coeffs": p.coeffs} for k, p in enumerate(self.polys)]}


def a_polys(count: int) -> APolySequence:
    """A_0..A_count computed by pow_scalar over Q[s]."""
    if count < 0:
        raise UsageError("a_polys needs K >= 0")
    s = AlphaPoly.variable("s")
    powered = pow_scalar(base_series(count), s)
    polys = [c if isinstance(c, AlphaPoly) else AlphaPoly.constant(c, "s") for c in powered.coeffs]
    return APolySequence(polys)


def a_polys_consistency(seq: APolySequence, powers: int = 3) -> list[Check]:
    """A_k(0) = δ_k0, A_k(1) = base coefficient, and A_k(m) matches the m-th power."""
    count = len(seq) - 1
    base = base_series(count)
    checks = [
        compare_sequences(
            "mfun.a_polys_at_zero",
            [p(Fraction(0)) for p in seq.polys],
            [Fraction(1)] + [Fraction(0)] * count,
        )
    ]
    power = TruncSeries.one(count)
    for m in range(1, powers + 1):
        power = power * base
        checks.append(
            compare_sequences(
                f"mfun.a_polys_at_{m}", [p(Fraction(m)) for p in seq.polys], power.coeffs, m=m
            )
        )
    degrees = [k for k, p in enumerate(seq.polys) if p.degree > k]
    checks.append(Check("mfun.a_polys_degree", not degrees, degrees, {"count": count}))
    return checks


@dataclass
class MSpecialValues:
    """Exact values: M(0), M(−N), and the rational cofactors of √(2/π) at half-integers."""

    m0: Fraction
    m_neg: dict[int, Fraction] = field(default_factory=dict)
    half_residues: dict[int, Fraction] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "m0": self.m0,
            "m_neg": {str(n): v for n, v in self.m_neg.items()},
            "half_residues": {str(n): {"coefficient": v, "radical": "sqrt(2/pi)"} for n, v in self.half_residues.items()},
        }


def m_special_values(n_max: int) -> MSpecialValues:
    """
    M(0) = A_2′(0) − A_0(0),
    M(−N) = (−1)^{N−1}·2^N·(N−1)!·A_{2N+2}(−N) for N ≥ 1, and
    lim (s+N)·M(s+½) = (−1)^{N−1}·(2N)!/(2^N·N!)·A_{2N+1}(½−N)/(2N−1)·√(2/π).
    """
    if not 0 <= n_max <= MAX_SPECIAL:
        raise UsageError(f"special values limited to N <= {MAX_SPECIAL}, got {n_max}")
    seq = a_polys(2 * n_max + 2)
    m0 = seq[2].derivative()(Fraction(0)) - seq[0](Fraction(0))
    m_neg = {
        n: Fraction((-1) ** (n - 1) * 2**n * factorial(n - 1)) * seq[2 * n + 2](Fraction(-n))
        for n in range(1, n_max + 1)
    }
    half = {}
    for n in range(n_max + 1):
        sign = Fraction(-1) if n % 2 == 0 else Fraction(1)
        scale = Fraction(factorial(2 * n), 2**n * factorial(n))
        half[n] = sign * scale * seq[2 * n + 1](Fraction(1, 2) - n) / (2 * n - 1)
    logger.info(f"m_special_values: M(0) = {m0}, N up to {n_max}")
    return MSpecialValues(m0=m0, m_neg=m_neg, half_residues=half)


def m0_from_expansion() -> Fraction:
    """M(0) read off the term-wise expansion: 2·(A_0(0)/(−2) + lim A_2(s)/(2s))."""
    a2 = a_polys(2)[2]
    return 2 * (Fraction(-1, 2) + a2.div_var()(Fraction(0)) / 2)


def residue_zero_scan(n_max: int = MAX_SPECIAL) -> Check:
    """Reports which half-integer residue cofactors and M(−N) values vanish."""
    values = m_special_values(n_max)
    zero_residues = [n for n, v in values.half_residues.items() if v == 0]
    zero_values = [n for n, v in values.m_neg.items() if v == 0]
    return Check(
        "mfun.residue_zero_scan",
        True,
        [],
        {"zero_half_residues": zero_residues, "zero_negative_values": zero_values, "n_max": n_max},
        exploratory=True,
    )


# ---------------------------------------------------------------------------
# Numerics
# ---------------------------------------------------------------------------


def _normalized_partial_sum(n: int, prec: int) -> mpmath.mpf:
    # e^{−n}·Σ_{k≤n} n^k/k!
    if n <= _LADDER_LIMIT:
        with mpmath.workprec(prec + 20):
            term = mpmath.exp(-n)
            total = term
            for k in range(1, n + 1):
                term = term * n / k
                total += term
            return total
    with mpmath.workprec(prec + 20):
        ratio = mpmath.exp(n * mpmath.log(n) - n - mpmath.loggamma(n + 1))
        return mpmath.mpf(1) / 2 + ratio * (
            mpmath.mpf(2) / 3 - mpmath.mpf(4) / (135 * n) + mpmath.mpf(8) / (2835 * n * n)
        )


def _series_tail(s, terms: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    # e^{−n}Σ n^k/k! − 1/2 = c·n^{−1/2}·(2/3 − (23/270)/n + O(n^{−2})), c = (2π)^{−1/2}
    c = 1 / mpmath.sqrt(2 * mpmath.pi)
    a = terms + 1
    tail = (
        mpmath.zeta(s, a) / 2
        + 2 * c * mpmath.zeta(s + mpmath.mpf(1) / 2, a) / 3
        - 23 * c * mpmath.zeta(s + mpmath.mpf(3) / 2, a) / 270
    )
    error = c * mpmath.zeta(s + mpmath.mpf(5) / 2, a)
    # the ladder/asymptotic switch drops the n^{−3} term of the Ramanujan expansion
    error += 16 * c * mpmath.zeta(s + mpmath.mpf(7) / 2, _LADDER_LIMIT + 1) / 8505
    return tail, error


def m_series(s, terms: int = 10000, prec: int = DEFAULT_PREC) -> Measured:
    """The defining series for s > 1, summed to N terms plus the asymptotic tail."""
    with mpmath.workprec(prec + 20):
        s = to_mpf(s)
        if s <= 1:
            raise DomainError("the defining series of M(s) needs s > 1; use the integral routes")
        partial = mpmath.fsum(_normalized_partial_sum(n, prec) / mpmath.mpf(n) ** s for n in range(1, terms + 1))
        tail, error = _series_tail(s, terms)
        return Measured(partial + tail, error, prec, {"terms": terms, "partial": partial, "tail": tail})


def _log_gap(t: mpmath.mpf) -> mpmath.mpf:
    # −t − ln(1−t), by its series near 0
    if t == 0:
        return mpmath.mpf(0)
    if t < mpmath.mpf(1) / 4:
        total = mpmath.mpf(0)
        power = t
        k = 1
        eps = mpmath.eps
        while True:
            k += 1
            power *= t
            piece = power / k
            total += piece
            if piece < eps * total:
                return total
    return -t - mpmath.log(1 - t)


def m_integral_first(s, prec: int = DEFAULT_PREC) -> Measured:
    """M(s) = (1/Γ(s))·∫₀¹ (−t − ln(1−t))^{s−1}·(1 + 1/t) dt."""
    with mpmath.workprec(prec + 20):
        s = to_mpf(s)
        if s <= 1:
            raise DomainError("the first integral representation needs s > 1")
        result = quad(lambda t: _log_gap(t) ** (s - 1) * (1 + 1 / t), 0, 1, prec)
        weight = mpmath.gamma(s)
        return Measured(result.value / weight, result.error / weight, prec)


def m_integral_second(s, prec: int = DEFAULT_PREC) -> Measured:
    """M(s) = (2/(s·Γ(s)))·∫₀¹ (−t − ln(1−t))^s/t³ dt."""
    with mpmath.workprec(prec + 20):
        s = to_mpf(s)
        if s <= 1:
            raise DomainError("the second integral representation needs s > 1")
        result = quad(lambda t: _log_gap(t) ** s / t**3, 0, 1, prec)
        weight = 2 / (s * mpmath.gamma(s))
        return Measured(result.value * weight, result.error * weight, prec)


@dataclass
class MRoutes:
    """M(s) by the defining series and by both integral representations."""

    s: Any
    series: Measured
    first: Measured
    second: Measured

    def checks(self, floor=None) -> list[Check]:
        floor = mpmath.mpf("1e-10") if floor is None else to_mpf(floor)
        pairs = [("series_vs_first", self.series, self.first), ("series_vs_second", self.series, self.second),
                 ("first_vs_second", self.first, self.second)]
        return [
            within(f"mfun.{name}", a.value, b.value, a.error + b.error + floor, s=self.s)
            for name, a, b in pairs
        ]

    def to_dict(self) -> dict[str, Any]:
        return {"s": self.s, "series": self.series, "first_integral": self.first, "second_integral": self.second}


def m_numeric(s, terms: int = 10000, prec: int = DEFAULT_PREC) -> MRoutes:
    series = m_series(s, terms, prec)
    routes = MRoutes(s=s, series=series, first=m_integral_first(s, prec), second=m_integral_second(s, prec))
    logger.info(f"m_numeric: M({s}) = {mpmath.nstr(series.value, 15)}")
    return routes


def a_series_trend(s, cutoffs=(5, 10, 20, 30), prec: int = DEFAULT_PREC) -> Check:
    """
    Partial sums Σ_{k≤K} A_k(s)/(2s−2+k) against 2^{s−1}·Γ(s+1)·M(s).
    The series is not known to converge; only the trend is reported.
    """
    s = Fraction(s)
    if s <= 1:
        raise DomainError("a_series_trend needs s > 1")
    top = max(cutoffs)
    coeffs = pow_scalar(base_series(top), s).coeffs
    with mpmath.workprec(prec + 20):
        target = (
            mpmath.mpf(2) ** (to_mpf(s) - 1)
            * mpmath.gamma(to_mpf(s) + 1)
            * m_integral_second(s, prec).value
        )
        running = mpmath.mpf(0)
        partials = {}
        for k, a in enumerate(coeffs):
            running += to_mpf(a / (2 * s - 2 + k))
            if k in cutoffs:
                partials[str(k)] = running
        gaps = [abs(v - target) for v in partials.values()]
    shrinking = all(b <= a for a, b in zip(gaps, gaps[1:]))
    return Check(
        "mfun.a_series_trend",
        shrinking,
        [],
        {"s": s, "target": target, "partials": partials, "gaps": gaps},
        exploratory=True,
    )


# ---------------------------------------------------------------------------
# The limit 1 − ½ ln 2
# ---------------------------------------------------------------------------


def remark11_expression(x, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """−W(−x/e) − ln(1 + W(−x/e)) + ½·ln(1 − x) for 0 ≤ x < 1."""
    with mpmath.workprec(prec + 20):
        x = to_mpf(x)
        if not 0 <= x < 1:
            raise DomainError("remark11_expression needs 0 <= x < 1")
        w = lambert_w(-x / mpmath.e, prec)
        return -w - mpmath.log(1 + w) + mpmath.log(1 - x) / 2


def remark11_limit(prec: int = DEFAULT_PREC, ladder=(8, 10, 12, 14, 16, 18)) -> Measured:
    """
    Value of the expression at x = 1 − ε for ε = 10^{−j}, extrapolated to
    ε = 0 in powers of √ε.
    """
    with mpmath.workprec(prec + 20):
        hs, values = [], []
        for j in ladder:
            eps = mpmath.mpf(10) ** (-j)
            hs.append(mpmath.sqrt(eps))
            values.append(remark11_expression(1 - eps, prec))
        value, error = richardson(hs, values)
        target = 1 - constants(prec).ln2 / 2
        detail = {
            "ladder": {f"1e-{j}": v for j, v in zip(ladder, values)},
            "target": target,
            "diff": abs(value - target),
        }
    return Measured(value, error, prec, detail)


def remark11_direct(terms: int = 10000, prec: int = DEFAULT_PREC) -> Measured:
    """Σ_{n≤N} [e^{−n}/n·Σ_{k≤n} n^k/k! − 1/(2n)], the raw partial sum; tail ~ N^{−1/2}."""
    with mpmath.workprec(prec + 20):
        partial = mpmath.fsum(
            (_normalized_partial_sum(n, prec) - mpmath.mpf(1) / 2) / n for n in range(1, terms + 1)
        )
        c = 1 / mpmath.sqrt(2 * mpmath.pi)
        tail = 2 * c * mpmath.zeta(mpmath.mpf(3) / 2, terms + 1) / 3
        target = 1 - constants(prec).ln2 / 2
        return Measured(partial, tail, prec, {"terms": terms, "corrected": partial + tail, "target": target})
