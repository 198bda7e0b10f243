"""
The p-parameterized family built on Δ_p = (e^{px} − 1)/p.

Members (all normalized, all to the same truncation order):

    y_p = Δ_p·e^{−x}      γ_p = y_p^{inv}
    ω_p = (𝔗y_p)^{inv}    T_p = 𝔗⁻¹y_p       ψ_p = T_p^{inv}

At p = 0 the limits Δ_0 = x and y_0 = x·e^{−x} come out of the same
constructors. Every closed form below is checked against the members
built by inversion and 𝔗; numeric statements run through mpmath.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import comb, factorial
from typing import Any, Callable

import mpmath

from invseries.binomial import ALPHA, exp_alpha, from_generator, log_deform_series
from invseries.checks import Check, compare_sequences, compare_series, within
from invseries.errors import DomainError, UsageError
from invseries.mfunction import partial_exp_sum
from invseries.numerics import DEFAULT_PREC, Measured, constants, quad, richardson, to_mpf
from invseries.poly import AlphaPoly
from invseries.series import (
    TruncSeries,
    bernoulli_poly,
    comp_inverse,
    composition_sum,
    div,
    exp,
    exp_series,
    expm1_series,
    gen_binomial,
    log,
    log1p_series,
    pow_scalar,
    tanh_series,
)
from invseries.tchain import t_apply, t_inverse

logger = logging.getLogger("invseries")

MAX_ORDER = 64
THM41_MAX_ORDER = 12
CHECK_GROUPS = ("41", "42", "43", "44", "45", "obs", "all")


@dataclass
class PFamily:
    p: Fraction
    order: int
    delta: TruncSeries
    y: TruncSeries
    gamma: TruncSeries
    omega: TruncSeries
    t_big: TruncSeries
    psi: TruncSeries

    def members(self) -> dict[str, TruncSeries]:
        return {
            "delta": self.delta,
            "y": self.y,
            "gamma": self.gamma,
            "omega": self.omega,
            "t_big": self.t_big,
            "psi": self.psi,
        }

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"p": self.p, "order": self.order}
        out.update({name: s.to_dict() for name, s in self.members().items()})
        return out


def _y_series(p: Fraction, order: int) -> TruncSeries:
    return expm1_series(order, p) * exp_series(order, -1)


def _t_big(p: Fraction, order: int) -> TruncSeries:
    return t_inverse(_y_series(p, order))


def construct(p, order: int = 12) -> PFamily:
    if not 2 <= order <= MAX_ORDER:
        raise UsageError(f"family order {order} outside [2, {MAX_ORDER}]")
    p = Fraction(p)
    delta = expm1_series(order, p)
    y = delta * exp_series(order, -1)
    t_big = t_inverse(y)
    fam = PFamily(
        p=p,
        order=order,
        delta=delta,
        y=y,
        gamma=comp_inverse(y),
        omega=comp_inverse(t_apply(y)),
        t_big=t_big,
        psi=comp_inverse(t_big),
    )
    logger.info(f"family: p = {p}, order {order}")
    return fam


def _require_nonzero(fam: PFamily, what: str) -> Fraction:
    if fam.p == 0:
        raise DomainError(f"{what} needs p != 0")
    return fam.p


def _as_poly(c) -> AlphaPoly:
    return c if isinstance(c, AlphaPoly) else AlphaPoly.constant(c)


def _alpha_log_coeffs(inverse: TruncSeries, n_max: int) -> list[AlphaPoly]:
    """[xⁿ] (e^{α·g} − 1)/α for n = 1..n_max."""
    series = exp(inverse.scale(ALPHA))
    return [_as_poly(series[n]).div_var() for n in range(1, n_max + 1)]


def _pole_sum(n: int, p: Fraction) -> Fraction:
    """Σ_{k≤n} C(n/p, k)·p^k·(1−p)^{n−k}; at p = 0 the limit Σ n^k/k!."""
    if p == 0:
        return partial_exp_sum(n)
    top = Fraction(n) / p
    q = 1 - p
    total = Fraction(0)
    binom = Fraction(1)
    for k in range(n + 1):
        if k:
            binom = binom * (top - k + 1) / k
        total += binom * p**k * q ** (n - k)
    return total


# ---------------------------------------------------------------------------
# Propositions on γ_p, ω_p
# ---------------------------------------------------------------------------


def prop41_check(fam: PFamily) -> list[Check]:
    """γ_p = Σ (px)ⁿ/n·C(n/p, n) and e^{αγ_p} = Σ α(px)ⁿ/(α+n)·C((α+n)/p, n)."""
    p = _require_nonzero(fam, "prop41_check")
    n_max = fam.order
    coeffs = [Fraction(0)] + [p**n / n * gen_binomial(Fraction(n) / p, n) for n in range(1, n_max + 1)]
    checks = [compare_sequences("family.prop41.gamma", fam.gamma.coeffs, coeffs, p=p)]

    direct = exp(fam.gamma.scale(ALPHA))
    formula = [AlphaPoly.constant(1)]
    for n in range(1, n_max + 1):
        b = _as_poly(gen_binomial((ALPHA + n) / p, n)) * p**n
        formula.append(b.exact_div_linear(-n) * ALPHA)
    checks.append(compare_sequences("family.prop41.exp_alpha", direct.coeffs, formula, p=p))
    return checks


def prop42_check(fam: PFamily) -> list[Check]:
    """ω_p = (1/p)·ln((1+x)/(1+(1−p)x)) = Σ xⁿ((p−1)ⁿ − (−1)ⁿ)/(pn); ω_0 = x/(1+x)."""
    p, n_max = fam.p, fam.order
    one, x = TruncSeries.one(n_max), TruncSeries.x(n_max)
    if p == 0:
        closed = div(x, one + x)
        coeffs = [Fraction(0)] + [Fraction((-1) ** (n - 1)) for n in range(1, n_max + 1)]
    else:
        closed = log(div(one + x, one + x.scale(1 - p))) / p
        coeffs = [Fraction(0)] + [((p - 1) ** n - (-1) ** n) / (p * n) for n in range(1, n_max + 1)]
    return [
        compare_series("family.prop42.closed_form", fam.omega, closed, p=p),
        compare_sequences("family.prop42.coefficients", fam.omega.coeffs, coeffs, p=p),
    ]


def prop43_check(fam: PFamily) -> Check:
    """x·e^{γ_p} = (x·(1+px)^{−1/p})^{inv}; at p = 0 the bracket is x·e^{−x}."""
    p, n_max = fam.p, fam.order
    x = TruncSeries.x(n_max)
    left = exp(fam.gamma).shift_up().truncate(n_max)
    if p == 0:
        inner = x * exp_series(n_max, -1)
    else:
        inner = x * pow_scalar(TruncSeries.one(n_max) + x.scale(p), -1 / p)
    return compare_series("family.prop43", left, comp_inverse(inner), p=p)


# ---------------------------------------------------------------------------
# Observations
# ---------------------------------------------------------------------------


def _obs_differential(fam: PFamily, prec: int) -> list[Check]:
    p, n = fam.p, fam.order
    y = fam.y
    dy = y.derivative()
    ode_right = dy.truncate(n - 2).scale(p - 2) + y.truncate(n - 2).scale(p - 1)
    tp = t_apply(y)
    riccati = (
        TruncSeries.one(n - 1)
        + tp.truncate(n - 1).scale(2 - p)
        + (tp * tp).truncate(n - 1).scale(1 - p)
    )
    one, x = TruncSeries.one(n - 1), TruncSeries.x(n - 1)
    chi = (one + x) * (one + x.scale(1 - p))
    return [
        compare_series("family.obs41.second_order_ode", dy.derivative(), ode_right, p=p),
        compare_series("family.obs41.riccati", tp.derivative(), riccati, p=p),
        compare_series("family.obs41.omega_derivative", fam.omega.derivative(), div(one, chi), p=p),
    ]


def _obs_power_product(fam: PFamily, prec: int) -> list[Check]:
    # Non-integer p − 1 is read as pow_scalar on a series with constant term 1.
    p, n = fam.p, fam.order
    dy = fam.y.derivative()
    y = fam.y.truncate(n - 1)
    left = (dy + y) * pow_scalar(dy + y.scale(1 - p), p - 1)
    return [compare_series("family.obs42", left, TruncSeries.one(n - 1), p=p)]


def _y_pair(p: Fraction, u: mpmath.mpf) -> tuple[mpmath.mpf, mpmath.mpf]:
    # y_p(u) and y_p′(u) in mpf arithmetic
    damp = mpmath.exp(-u)
    if p == 0:
        return u * damp, (1 - u) * damp
    pf = to_mpf(p)
    delta = mpmath.expm1(pf * u) / pf
    return delta * damp, (mpmath.exp(pf * u) - delta) * damp


def _omega_numeric(p: Fraction, x: mpmath.mpf) -> mpmath.mpf:
    if p == 0:
        return x / (1 + x)
    pf = to_mpf(p)
    return mpmath.log((1 + x) / (1 + (1 - pf) * x)) / pf


def _obs_laplace(fam: PFamily, prec: int, points=(Fraction(1, 10), Fraction(-1, 10), Fraction(1, 20))) -> list[Check]:
    """ω_p(x) = ∫_0^∞ y_p(xt)/t·e^{−t} dt at small |x|."""
    p = fam.p
    checks = []
    for point in points:
        with mpmath.workprec(prec + 20):
            x = to_mpf(point)
            measured = quad(lambda t: _y_pair(p, x * t)[0] / t * mpmath.exp(-t), 0, mpmath.inf, prec)
            target = _omega_numeric(p, x)
            tol = measured.error + mpmath.mpf(2) ** (-(prec // 4))
            checks.append(within("family.obs43.laplace", measured.value, target, tol, p=p, x=point))
    return checks


def _obs_derivative_argument(fam: PFamily, prec: int) -> list[Check]:
    p, n = fam.p, fam.order
    one, x = TruncSeries.one(n), TruncSeries.x(n)
    x_dgamma = fam.gamma.derivative().shift_up()
    if p == 0:
        inner = div(x * exp(-div(x, one + x)), one + x)
    else:
        inner = (
            x
            * pow_scalar(one + x, -1 / p)
            * pow_scalar(one + x.scale(1 - p), (1 - p) / p)
        )
    return [
        compare_series("family.obs44.omega_of_x_dgamma", fam.omega.compose(x_dgamma), fam.gamma, p=p),
        compare_series("family.obs44.x_dgamma_inverse", x_dgamma, comp_inverse(inner), p=p),
    ]


def _obs_derivative(fam: PFamily, prec: int) -> list[Check]:
    p, n = fam.p, fam.order
    dgamma = fam.gamma.derivative()
    x = TruncSeries.x(n - 1)
    shifted = exp(fam.gamma.scale(p - 1)).truncate(n - 1) - x
    gamma = fam.gamma.truncate(n - 1)
    log_form = gamma.scale(1 - p) + log(TruncSeries.one(n - 1) + dgamma.shift_up().truncate(n - 1))
    return [
        compare_series("family.obs45.reciprocal", dgamma, div(TruncSeries.one(n - 1), shifted), p=p),
        compare_series("family.obs45.log_form", log(dgamma), log_form, p=p),
    ]


def _obs_addition(
    fam: PFamily,
    prec: int,
    pairs=((Fraction(1, 3), Fraction(1, 5)), (Fraction(-1, 2), Fraction(1, 7)), (Fraction(1), Fraction(-2, 3))),
) -> list[Check]:
    """Addition laws for y_p and y_p′ at sample points."""
    p = fam.p
    checks = []
    with mpmath.workprec(prec + 20):
        tol = mpmath.mpf(2) ** (16 - prec)
        k = to_mpf(p)
        for a, b in pairs:
            ya, da = _y_pair(p, to_mpf(a))
            yb, db = _y_pair(p, to_mpf(b))
            ys, ds = _y_pair(p, to_mpf(a + b))
            checks.append(
                within("family.obs46.y", ys, da * yb + ya * db + (2 - k) * ya * yb, tol, p=p, a=a, b=b)
            )
            checks.append(within("family.obs46.dy", ds, da * db + (k - 1) * ya * yb, tol, p=p, a=a, b=b))
    return checks


def _obs_rescaling(fam: PFamily, prec: int) -> list[Check]:
    """
    y_{p/(p−1)}(x) = (1−p)·y_p(x/(1−p)), the same for γ, the p ↦ p/(p−1)
    involution, y_{−p} = y_p·e^{−px} and y_{p/(p+1)} = (1+p)·y_p(x/(1+p))·e^{−px/(p+1)}.
    """
    p, n = fam.p, fam.order
    checks = [
        compare_series("family.obs47a.negated", _y_series(-p, n), fam.y * exp_series(n, -p), p=p),
    ]
    if p != 1:
        q = p / (p - 1)
        c = 1 - p
        y_q = _y_series(q, n)
        checks.append(compare_series("family.obs47a.y", y_q, fam.y.rescale(1 / c).scale(c), p=p))
        checks.append(
            compare_series("family.obs47a.gamma", comp_inverse(y_q), fam.gamma.rescale(1 / c).scale(c), p=p)
        )
        back = y_q.rescale(1 / (1 - q)).scale(1 - q)
        checks.append(compare_series("family.obs47a.involution", back, fam.y, p=p))
    if p != -1:
        r = p / (p + 1)
        right = fam.y.rescale(1 / (1 + p)).scale(1 + p) * exp_series(n, -r)
        checks.append(compare_series("family.obs47a.successor", _y_series(r, n), right, p=p))
    return checks


OBSERVATIONS: dict[int, Callable[[PFamily, int], list[Check]]] = {
    1: _obs_differential,
    2: _obs_power_product,
    3: _obs_laplace,
    4: _obs_derivative_argument,
    5: _obs_derivative,
    6: _obs_addition,
    7: _obs_rescaling,
}


def observations_check(fam: PFamily, which: int | None = None, prec: int = 128) -> list[Check]:
    """Observations 1..7 (all when ``which`` is None); 3 and 6 are numeric."""
    if which is None:
        keys = sorted(OBSERVATIONS)
    elif which in OBSERVATIONS:
        keys = [which]
    else:
        raise UsageError(f"unknown observation {which}", ["choose 1..7"])
    checks: list[Check] = []
    for key in keys:
        checks.extend(OBSERVATIONS[key](fam, prec))
    return checks


def chain_check(fam: PFamily) -> list[Check]:
    """
    Coherence of the family: 𝔗T_p = y_p, double inversion is the identity,
    𝔗Δ_p = Δ_{−p}, Δ_p^{inv} = ln(1+px)/p and 𝔗²y_p = Δ_p(1 − Δ_{−p}) = y_p·y_p′·e^{(2−p)x}.
    """
    p, n = fam.p, fam.order
    checks = [compare_series("family.chain.t_of_t_big", t_apply(fam.t_big), fam.y, p=p)]
    bad = [name for name, s in fam.members().items() if comp_inverse(comp_inverse(s)) != s]
    checks.append(Check("family.chain.double_inverse", not bad, bad, {"p": p}))
    checks.append(compare_series("family.chain.t_of_delta", t_apply(fam.delta), expm1_series(n, -p), p=p))
    log_form = log1p_series(n).rescale(p) / p if p != 0 else TruncSeries.x(n)
    checks.append(compare_series("family.chain.delta_inverse", comp_inverse(fam.delta), log_form, p=p))

    second = t_apply(t_apply(fam.y))
    checks.append(
        compare_series(
            "family.remark44.delta_form",
            second,
            fam.delta * (TruncSeries.one(n) - expm1_series(n, -p)),
            p=p,
        )
    )
    product = (fam.y.shift_down() * fam.y.derivative()).shift_up()
    checks.append(
        compare_series("family.remark44.product_form", second, product * exp_series(n, 2 - p), p=p)
    )
    return checks


# ---------------------------------------------------------------------------
# T_p and ψ_p
# ---------------------------------------------------------------------------


def prop44_corollary41_check(fam: PFamily) -> list[Check]:
    """
    T_{p/(p−1)}(x) = (1−p)·T_p(x/(1−p)) (and the same for ψ),
    T_{−p} = T_p·e^{p(e^x−1)}, T_{1/n}(nx) = nΔ_1·e^{Δ_1+…+Δ_{n−1}} for n = 2, 3,
    and T_{2/(2n+1)}((2n+1)x) = 2(2n+1)·tanh(x/2)·e^{2Δ_1+2Δ_3+…+2Δ_{2n−1}} for n = 1, 2.
    """
    p, n_max = fam.p, fam.order
    checks = []
    if p != 1:
        q, c = p / (p - 1), 1 - p
        t_q = _t_big(q, n_max)
        checks.append(compare_series("family.prop44.t_rescaled", t_q, fam.t_big.rescale(1 / c).scale(c), p=p))
        checks.append(
            compare_series("family.prop44.psi_rescaled", comp_inverse(t_q), fam.psi.rescale(1 / c).scale(c), p=p)
        )
    factor = exp(expm1_series(n_max).scale(p))
    checks.append(compare_series("family.prop44.t_negated", _t_big(-p, n_max), fam.t_big * factor, p=p))

    zero = TruncSeries.zero(n_max)
    for n in (2, 3):
        left = _t_big(Fraction(1, n), n_max).rescale(n)
        exponent = reduce(lambda acc, k: acc + expm1_series(n_max, k), range(1, n), zero)
        right = expm1_series(n_max).scale(n) * exp(exponent)
        checks.append(compare_series("family.cor41.unit_fraction", left, right, n=n))
    half_tanh = tanh_series(n_max, Fraction(1, 2)) / 2
    for n in (1, 2):
        m = 2 * n + 1
        left = _t_big(Fraction(2, m), n_max).rescale(m)
        exponent = reduce(lambda acc, k: acc + expm1_series(n_max, 2 * k - 1).scale(2), range(1, n + 1), zero)
        right = half_tanh.scale(2 * m) * exp(exponent)
        checks.append(compare_series("family.cor41.odd_fraction", left, right, n=n))
    return checks


def _w_series(order: int) -> TruncSeries:
    return comp_inverse(TruncSeries.x(order) * exp_series(order))


def _psi_closed_forms(order: int) -> dict[Fraction, TruncSeries]:
    one, x = TruncSeries.one(order), TruncSeries.x(order)
    w = _w_series(order)
    arcth_half = TruncSeries.from_function(
        lambda n: Fraction(2, n * 2**n) if n % 2 else Fraction(0), order
    )
    inner = comp_inverse(div(x, one + x / 2) * exp_series(order, 2))
    return {
        Fraction(1): log1p_series(order),
        Fraction(-1): log(one + w),
        Fraction(2): arcth_half,
        Fraction(1, 2): log(one + w.rescale(Fraction(1, 2))).scale(2),
        Fraction(-2): log(one + inner),
    }


def prop45_check(order: int = 12) -> list[Check]:
    """ψ_1 = ln(1+x), ψ_{−1} = ln(1+W(x)), ψ_2 = 2·arcth(x/2), ψ_{1/2} = 2·ln(1+W(x/2)), ψ_{−2}."""
    checks = []
    for p, closed in _psi_closed_forms(order).items():
        psi = comp_inverse(_t_big(p, order))
        checks.append(compare_series("family.prop45", psi, closed, p=p))
    return checks


# ---------------------------------------------------------------------------
# Theorems
# ---------------------------------------------------------------------------


def thm41_check(fam: PFamily, n_max: int | None = None) -> Check:
    """
    [xⁿ](e^{αψ_p} − 1)/α = (1/n)·Σ_k p^{k−1}α^{n−k}/(n−k)!·Σ_m (−n)^m/m!·
    Σ_{q_1+…+q_m = k−1} Π B_{q_i}(1/p)/(q_i·q_i!).
    """
    p = _require_nonzero(fam, "thm41_check")
    n_max = min(fam.order, THM41_MAX_ORDER) if n_max is None else n_max
    if n_max > min(fam.order, THM41_MAX_ORDER):
        raise UsageError(f"thm41_check is limited to order {min(fam.order, THM41_MAX_ORDER)}")

    @lru_cache(maxsize=None)
    def weight(q: int) -> Fraction:
        return bernoulli_poly(q, 1 / p) / (q * factorial(q))

    left = _alpha_log_coeffs(fam.psi.truncate(n_max), n_max)
    right = []
    for n in range(1, n_max + 1):
        total = AlphaPoly()
        for k in range(1, n + 1):
            inner = sum(
                (Fraction(-n) ** m / factorial(m) * composition_sum(weight, k - 1, m) for m in range(k)),
                Fraction(0),
            )
            total = total + AlphaPoly.monomial(n - k, p ** (k - 1) * inner / factorial(n - k))
        right.append(total / n)
    return compare_sequences("family.thm41", left, right, start=1, p=p, order=n_max)


def thm43_check(fam: PFamily) -> list[Check]:
    """
    ln γ_p′ = Σ xⁿ/n·Σ_k C(n/p, k)p^k(1−p)^{n−k}, against the routes
    log of the derivative, −ln(e^{−γ_p} − (1−p)x), γ_p − ln(1 − (1−p)x·e^{γ_p})
    and the binomial-sequence expansion of −ln(1 − A·x·e^{γ}).
    """
    p = fam.p
    n = fam.order - 1
    direct = log(fam.gamma.derivative())
    formula = TruncSeries([Fraction(0)] + [_pole_sum(k, p) / k for k in range(1, n + 1)], n)
    gamma = fam.gamma.truncate(n)
    x = TruncSeries.x(n)
    one = TruncSeries.one(n)
    reciprocal = -log(exp(-gamma) - x.scale(1 - p))
    deformed = gamma - log(one - (x * exp(gamma)).scale(1 - p))

    seq = from_generator(fam.delta, n)
    expansion, expansion_check = log_deform_series(seq, 1 - p, n)
    return [
        compare_series("family.thm43.formula", direct, formula, p=p),
        compare_series("family.thm43.reciprocal_route", direct, reciprocal, p=p),
        compare_series("family.thm43.deformed_route", direct, deformed, p=p),
        compare_series("family.thm43.binomial_route", direct, gamma + expansion, p=p),
        expansion_check,
    ]


def thm44_target(p, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """((p−2)/(2p))·ln(1−p) − ½·ln 2, and 1 − ½·ln 2 at p = 0."""
    p = Fraction(p)
    with mpmath.workprec(prec + 20):
        half_ln2 = constants(prec).ln2 / 2
        if p == 0:
            return 1 - half_ln2
        pf = to_mpf(p)
        return (pf - 2) / (2 * pf) * mpmath.log(1 - pf) - half_ln2


def thm44_limit(p, prec: int = DEFAULT_PREC, ladder=(10, 12, 14, 16, 18, 20)) -> Measured:
    """
    lim_{x→1⁻} ln γ_p′(π_p·x) + ½·ln(1−x) for p in [0, 1), π_p = (1−p)^{(1−p)/p}.

    Evaluated in the variable of y_p: g(v) = −ln y_p′(u*+v) + ½·ln(1 − y_p(u*+v)/π_p)
    at v = −2^{−j}, u* = −ln(1−p)/p, then extrapolated to v = 0.
    """
    p = Fraction(p)
    if not 0 <= p < 1:
        raise DomainError("thm44_limit needs 0 <= p < 1")
    guard = 2 * max(ladder) + 32
    with mpmath.workprec(prec + guard):
        if p == 0:
            pole, radius = mpmath.mpf(1), mpmath.exp(-1)
        else:
            pf = to_mpf(p)
            pole = -mpmath.log(1 - pf) / pf
            radius = (1 - pf) ** ((1 - pf) / pf)
        hs, values = [], []
        for j in ladder:
            v = -mpmath.mpf(2) ** (-j)
            y, dy = _y_pair(p, pole + v)
            hs.append(v)
            values.append(-mpmath.log(dy) + mpmath.log(1 - y / radius) / 2)
        value, error = richardson(hs, values)
        target = thm44_target(p, prec)
        detail = {"p": p, "radius": radius, "pole": pole, "target": target, "diff": abs(value - target)}
    logger.info(f"thm44_limit: p = {p}, value {mpmath.nstr(value, 15)}")
    return Measured(value, error, prec, detail)


def remark43_limit(p, n_max: int = 200, checkpoints=(25, 50, 100, 200), prec: int = 128) -> Check:
    """
    Trend of (1−p)^{n(1−p)/p}·Σ_k C(n/p, k)p^k(1−p)^{n−k} toward 1/2 for p in (0, 1).

    Reported only; the detail holds the values at the checkpoints and the
    distance to 1/2 at n_max.
    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise DomainError("remark43_limit needs 0 < p < 1")
    points = sorted({n for n in checkpoints if n <= n_max} | {n_max})
    with mpmath.workprec(prec + 20):
        pf = to_mpf(p)
        rate = (1 - pf) ** ((1 - pf) / pf)
        values = {n: rate**n * to_mpf(_pole_sum(n, p)) for n in points}
        last = values[n_max]
        distance = abs(last - mpmath.mpf(1) / 2)
        distances = [abs(values[n] - mpmath.mpf(1) / 2) for n in points]
        shrinking = all(a >= b for a, b in zip(distances, distances[1:]))
    return Check(
        "family.remark43",
        shrinking,
        [],
        {"p": p, "values": {str(n): v for n, v in values.items()}, "last": last, "distance": distance},
        exploratory=True,
    )


def thm45_check(fam: PFamily) -> list[Check]:
    """
    Exact expansions of (e^{α·g^{inv}} − 1)/α for g = y_p, 𝔗y_p, 𝔗²y_p and
    y_p·y_p′, plus the shift α ↦ α + (2−p)n that carries the third into the
    fourth.
    """
    p = _require_nonzero(fam, "thm45_check")
    n_max = fam.order
    y = fam.y
    second = t_apply(t_apply(y))
    product = (y.shift_down() * y.derivative()).shift_up()

    def poly(c) -> AlphaPoly:
        return _as_poly(c)

    first, one_step, two_step, prod = [], [], [], []
    for n in range(1, n_max + 1):
        first.append(poly(gen_binomial((ALPHA + n) / p - 1, n - 1)) * (p ** (n - 1) / n))
        total = AlphaPoly()
        for k in range(n):
            total = total + poly(gen_binomial(ALPHA / p - 1, k)) * (comb(n, k + 1) * p**k * (p - 1) ** (n - 1 - k))
        one_step.append(total / n)
        total3, total4 = AlphaPoly(), AlphaPoly()
        for k in range(n):
            weight = comb(2 * n - k - 2, n - 1) * p**k * (1 - p) ** (n - 1 - k)
            total3 = total3 + poly(gen_binomial(ALPHA / p + n - 1, k)) * weight
            total4 = total4 + poly(gen_binomial((ALPHA + 2 * n - p) / p, k)) * weight
        two_step.append(total3 / n)
        prod.append(total4 / n)

    checks = [
        compare_sequences("family.thm45.y", _alpha_log_coeffs(fam.gamma, n_max), first, start=1, p=p),
        compare_sequences("family.thm45.t_y", _alpha_log_coeffs(fam.omega, n_max), one_step, start=1, p=p),
        compare_sequences(
            "family.thm45.t2_y", _alpha_log_coeffs(comp_inverse(second), n_max), two_step, start=1, p=p
        ),
        compare_sequences(
            "family.thm45.y_dy", _alpha_log_coeffs(comp_inverse(product), n_max), prod, start=1, p=p
        ),
    ]
    shifted = [two_step[n - 1].shift((2 - p) * n) for n in range(1, n_max + 1)]
    checks.append(compare_sequences("family.thm45.shift", shifted, prod, start=1, p=p))
    return checks


def remark42_check(fam: PFamily) -> Check:
    """α·(ν_n(α+p−1) − ν_n(α−1))/p = n·ν_n(α) with ν_n = n!·[xⁿ]e^{αψ_p}."""
    p = _require_nonzero(fam, "remark42_check")
    nu = exp_alpha(fam.psi)
    left = [(v.shift(p - 1) - v.shift(-1)) * ALPHA / p for v in nu]
    right = [v * n for n, v in enumerate(nu)]
    return compare_sequences("family.remark42", left, right, p=p)


def mp_partial_sums(p, s, terms: int = 100, prec: int = 128) -> Check:
    """
    Partial sums of M_p(s) = Σ n^{−s}·(1−p)^{n(1−p)/p}·Σ_k C(n/p, k)p^k(1−p)^{n−k}
    for p in (0, 1]. Only p = 1, where every coefficient is 1 and the sums
    are those of ζ(s), is asserted.
    """
    p = Fraction(p)
    if not 0 < p <= 1:
        raise DomainError("mp_partial_sums needs 0 < p <= 1")
    with mpmath.workprec(prec + 20):
        s_mp = to_mpf(s)
        pf = to_mpf(p)
        rate = (1 - pf) ** ((1 - pf) / pf) if p != 1 else mpmath.mpf(1)
        running = mpmath.mpf(0)
        partials = []
        for n in range(1, terms + 1):
            running += rate**n * to_mpf(_pole_sum(n, p)) / mpmath.mpf(n) ** s_mp
            partials.append(running)
        detail: dict[str, Any] = {"p": p, "s": s, "terms": terms, "partials": partials[-5:]}
        if p == 1:
            zeta_partial = mpmath.zeta(s_mp) - mpmath.zeta(s_mp, terms + 1)
            tol = mpmath.mpf(2) ** (16 - prec)
            detail["zeta_partial"] = zeta_partial
            passed = bool(abs(running - zeta_partial) <= tol)
            return Check("family.mp_partial_sums", passed, [] if passed else ["zeta mismatch"], detail)
    return Check("family.mp_partial_sums", True, [], detail, exploratory=True)


# ---------------------------------------------------------------------------
# Grouped runs
# ---------------------------------------------------------------------------


def family_checks(fam: PFamily, group: str = "all", prec: int = 128) -> list[Check]:
    """Checks for one ``--check`` group; statements outside their p-range are skipped in ``all``."""
    if group not in CHECK_GROUPS:
        raise UsageError(f"unknown check group {group!r}", [f"choose from {', '.join(CHECK_GROUPS)}"])
    p = fam.p
    strict = group != "all"
    checks: list[Check] = []

    def wanted(name: str) -> bool:
        return group in (name, "all")

    if wanted("41") and (strict or p != 0):
        checks.extend(prop41_check(fam))
        checks.append(thm41_check(fam))
    if wanted("42"):
        checks.extend(prop42_check(fam))
        if strict or p != 0:
            checks.append(remark42_check(fam))
    if wanted("43"):
        checks.append(prop43_check(fam))
        checks.extend(thm43_check(fam))
        if 0 < p < 1:
            checks.append(remark43_limit(p))
    if wanted("44"):
        checks.extend(prop44_corollary41_check(fam))
        if 0 <= p < 1:
            m = thm44_limit(p, prec)
            checks.append(within("family.thm44", m.value, m.detail["target"], m.error + mpmath.mpf(2) ** (-(prec // 2)), p=p))
    if wanted("45"):
        checks.extend(prop45_check(fam.order))
        if strict or p != 0:
            checks.extend(thm45_check(fam))
    if wanted("obs"):
        checks.extend(observations_check(fam, prec=prec))
        checks.extend(chain_check(fam))
    logger.info(f"family_checks[{group}]: {sum(c.passed for c in checks)}/{len(checks)} passed")
    return checks
