"""
Binomial-type polynomial sequences.

A normalized generator f determines φ = f^{inv} and the sequence
p_n(α) = n!·[xⁿ] exp(α·φ(x)). The checks in this module test the
convolution, delta-operator, 𝔗-operator and exponential-deformation
identities exactly in Q[α].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from invseries.checks import Check, compare_sequences
from invseries.errors import ConsistencyError, UsageError
from invseries.poly import AlphaPoly
from invseries.series import TruncSeries, comp_inverse, exp, exp_series, log
from invseries.tchain import t_apply

logger = logging.getLogger("invseries")

ALPHA = AlphaPoly.variable()


def _as_poly(c) -> AlphaPoly:
    return c if isinstance(c, AlphaPoly) else AlphaPoly.constant(c)


@dataclass
class BinomialSequence:
    """p_0..p_N for the generator f, with φ = f^{inv}."""

    generator: TruncSeries
    phi: TruncSeries
    polys: list[AlphaPoly]

    @property
    def order(self) -> int:
        return len(self.polys) - 1

    def __getitem__(self, n: int) -> AlphaPoly:
        return self.polys[n]

    def to_dict(self) -> dict:
        return {
            "generator": self.generator.to_dict(),
            "polys": [{"n": n, "coeffs": p.coeffs} for n, p in enumerate(self.polys)],
        }


def exp_alpha(phi: TruncSeries, alpha: AlphaPoly = ALPHA) -> list[AlphaPoly]:
    """n!·[xⁿ] exp(α·φ) for n ≤ order of φ, computed over Q[α]."""
    series = exp(phi.scale(alpha))
    return [_as_poly(c) * factorial(n) for n, c in enumerate(series.coeffs)]


def from_generator(f: TruncSeries, order: int | None = None) -> BinomialSequence:
    f.require_normalized("generator")
    order = f.order if order is None else order
    if order > f.order:
        raise UsageError(f"generator known to order {f.order}, asked for {order}")
    f = f.truncate(order)
    phi = comp_inverse(f)
    polys = exp_alpha(phi)
    logger.debug(f"from_generator: {order + 1} polynomials")
    return BinomialSequence(generator=f, phi=phi, polys=polys)


def invariants_check(seq: BinomialSequence) -> Check:
    """p_0 = 1, p_n(0) = 0, monic of degree n, and p_n(1) = n!·[xⁿ]e^{φ}."""
    failures: list[str] = []
    if seq.polys[0] != 1:
        failures.append("p_0 != 1")
    at_one = exp(seq.phi)
    for n, p in enumerate(seq.polys[1:], start=1):
        if p.coeff(0) != 0:
            failures.append(f"p_{n}(0) != 0")
        if p.degree != n or p.leading() != 1:
            failures.append(f"p_{n} not monic of degree {n}")
        if p(Fraction(1)) != at_one[n] * factorial(n):
            failures.append(f"p_{n}(1) mismatch")
    return Check("binomial.invariants", not failures, failures, {"order": seq.order})


# ---------------------------------------------------------------------------
# Operator identities
# ---------------------------------------------------------------------------


def _bivariate_shift(p: AlphaPoly) -> dict[tuple[int, int], Fraction]:
    # p(α + β) as {(i, j): coefficient of α^i β^j}
    out: dict[tuple[int, int], Fraction] = {}
    for m, c in enumerate(p.coeffs):
        if c == 0:
            continue
        for i in range(m + 1):
            key = (i, m - i)
            out[key] = out.get(key, Fraction(0)) + c * comb(m, i)
    return {k: v for k, v in out.items() if v != 0}


def _bivariate_product(a: AlphaPoly, b: AlphaPoly, scale: int) -> dict[tuple[int, int], Fraction]:
    # scale·a(α)·b(β)
    return {
        (i, j): ca * cb * scale
        for i, ca in enumerate(a.coeffs)
        if ca != 0
        for j, cb in enumerate(b.coeffs)
        if cb != 0
    }


def convolution_check(seq: BinomialSequence) -> Check:
    """p_n(α+β) = Σ C(n,k)·p_k(α)·p_{n−k}(β) as polynomials in α and β."""
    failures = []
    for n, p in enumerate(seq.polys):
        right: dict[tuple[int, int], Fraction] = {}
        for k in range(n + 1):
            for key, v in _bivariate_product(seq.polys[k], seq.polys[n - k], comb(n, k)).items():
                right[key] = right.get(key, Fraction(0)) + v
        right = {k: v for k, v in right.items() if v != 0}
        if _bivariate_shift(p) != right:
            failures.append(n)
    return Check("binomial.convolution", not failures, failures, {"order": seq.order})


def apply_operator_series(op: TruncSeries, q: AlphaPoly) -> AlphaPoly:
    """Σ a_k·(d/dα)^k q; the sum stops once the derivative vanishes."""
    result = AlphaPoly((), q.var)
    current = q
    for a in op.coeffs:
        if current.is_zero():
            break
        if a != 0:
            result = result + current * a
        current = current.derivative()
    if not current.is_zero():
        raise UsageError(
            f"operator series of order {op.order} too short for degree {q.degree}"
        )
    return result


def delta_check(seq: BinomialSequence) -> Check:
    """f(d/dα) p_n = n·p_{n−1}, with f(d/dα) 1 = 0."""
    f = seq.generator
    left = [apply_operator_series(f, p) for p in seq.polys]
    right = [AlphaPoly()] + [p * n for n, p in enumerate(seq.polys[:-1], start=1)]
    return compare_sequences("binomial.delta", left, right, order=seq.order)


def t_check(seq: BinomialSequence) -> Check:
    """(𝔗f)(d/dα) p_n = n·p_n/α for n ≥ 1."""
    op = t_apply(seq.generator)
    left = [apply_operator_series(op, p) for p in seq.polys[1:]]
    right = [p.div_var() * n for n, p in enumerate(seq.polys[1:], start=1)]
    return compare_sequences("binomial.t_operator", left, right, start=1, order=seq.order)


def deform_by_shift(seq: BinomialSequence) -> list[AlphaPoly]:
    """q_n(α) = α·p_n(α+n)/(α+n); the division must be exact."""
    out = [AlphaPoly.constant(1)]
    for n, p in enumerate(seq.polys[1:], start=1):
        out.append(p.shift(n).exact_div_linear(-n) * ALPHA)
    return out


def exp_deform(seq: BinomialSequence) -> BinomialSequence:
    """The sequence of the generator f·e^{−x}, built by the shift formula and by inversion."""
    n = seq.order
    deformed = from_generator(seq.generator * exp_series(n, -1))
    shifted = deform_by_shift(seq)
    mismatched = [k for k, (a, b) in enumerate(zip(shifted, deformed.polys)) if a != b]
    if mismatched:
        raise ConsistencyError(
            "shift formula disagrees with inversion of f·e^{-x}",
            [f"n = {k}" for k in mismatched],
        )
    return deformed


def tchain_poly_transform(seq: BinomialSequence, order: int | None = None) -> Check:
    """(f′(d/dα))ⁿ (p_n/α) = t_n/α, where t_n is generated by 𝔗f."""
    order = seq.order if order is None else order
    if order > seq.order:
        raise UsageError(f"sequence known to order {seq.order}, asked for {order}")
    f = seq.generator
    t_seq = from_generator(t_apply(f), order)
    slope = f.derivative()
    power = TruncSeries.one(slope.order)
    left, right = [], []
    for n in range(1, order + 1):
        power = power * slope
        left.append(apply_operator_series(power, seq.polys[n].div_var()))
        right.append(t_seq.polys[n].div_var())
    return compare_sequences("binomial.tchain_transform", left, right, start=1, order=order)


def log_deform_series(seq: BinomialSequence, a, order: int | None = None) -> tuple[TruncSeries, Check]:
    """
    Coefficients (1/n)·Σ_{k<n} p_k(n)·A^{n−k}/k! of −ln(1 − A·x·e^{γ(x)}),
    where γ = (f·e^{−x})^{inv}. Returns the series and the comparison with
    the direct expansion.
    """
    order = seq.order if order is None else order
    a = Fraction(a)
    coeffs = [Fraction(0)]
    for n in range(1, order + 1):
        total = sum(
            (seq.polys[k](Fraction(n)) * a ** (n - k) / factorial(k) for k in range(n)),
            Fraction(0),
        )
        coeffs.append(total / n)
    formula = TruncSeries(coeffs, order)

    f = seq.generator.truncate(order)
    gamma = comp_inverse(f * exp_series(order, -1))
    inner = exp(gamma).shift_up().truncate(order).scale(a)
    direct = -log(TruncSeries.one(order) - inner)
    check = compare_sequences("binomial.log_deform", formula.coeffs, direct.coeffs, a=a, order=order)
    return formula, check
