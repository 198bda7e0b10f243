"""
The inverse logarithmic derivative 𝔗f = f/f′ and its chains.

All maps act on normalized series (c_0 = 0, c_1 = 1) and keep the
truncation order: 𝔗 and 𝔗⁻¹ are computed through f/x so that no order
is lost to the derivative.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable

from invseries.checks import Check, compare_series, compare_sequences
from invseries.errors import UsageError
from invseries.series import (
    TruncSeries,
    comp_inverse,
    compose,
    div,
    exp,
    exp_series,
    expm1_series,
    pow_scalar,
    sin_series,
    sinh_series,
    tanh_series,
)

logger = logging.getLogger("invseries")

MAX_CHAIN = 64


def t_apply(f: TruncSeries) -> TruncSeries:
    """𝔗f = f/f′ = x·u/(u + x·u′) with u = f/x."""
    f.require_normalized("t_apply argument")
    u = f.shift_down()
    if u.order == 0:
        return f
    slope = u.derivative().shift_up()
    return div(u, u + slope).shift_up()


def t_inverse(f: TruncSeries) -> TruncSeries:
    """𝔗⁻¹f = x·exp(∫ (1/f(t) − 1/t) dt)."""
    f.require_normalized("t_inverse argument")
    u = f.shift_down()
    if u.order == 0:
        return f
    integrand = (div(TruncSeries.one(u.order), u) - 1).shift_down()
    return exp(integrand.integrate()).shift_up()


def t_power(f: TruncSeries, k: int) -> TruncSeries:
    """𝔗^k f; negative k applies the inverse."""
    step = t_apply if k >= 0 else t_inverse
    for _ in range(abs(k)):
        f = step(f)
    return f


@dataclass
class ChainState:
    """Links 𝔗^j f for j in ``powers``; links[0] is the seed."""

    links: list[TruncSeries]
    powers: list[int] = field(default_factory=list)

    @property
    def seed(self) -> TruncSeries:
        return self.links[0]

    def to_dict(self) -> dict:
        return {"links": [{"power": k, "series": s} for k, s in zip(self.powers, self.links)]}


def chain(f: TruncSeries, k: int, order: int | None = None) -> ChainState:
    if abs(k) > MAX_CHAIN:
        raise UsageError(f"chain length {k} exceeds the limit of {MAX_CHAIN}")
    order = f.order if order is None else order
    f = f.truncate(order)
    f.require_normalized("chain seed")
    step = t_apply if k >= 0 else t_inverse
    sign = 1 if k >= 0 else -1
    links = [f]
    for _ in range(abs(k)):
        links.append(step(links[-1]))
    logger.info(f"chain: {abs(k)} links at order {order}")
    return ChainState(links=links, powers=[sign * j for j in range(abs(k) + 1)])


def find_period(f: TruncSeries, max_k: int = 8, order: int | None = None) -> int | None:
    """Least k ≤ max_k with 𝔗^k f = f to the given order, or None."""
    if max_k > MAX_CHAIN:
        raise UsageError(f"max_k {max_k} exceeds the limit of {MAX_CHAIN}")
    order = f.order if order is None else order
    f = f.truncate(order)
    link = f
    for k in range(1, max_k + 1):
        link = t_apply(link)
        if link == f:
            return k
    return None


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------


def identities_310(f: TruncSeries, order: int | None = None) -> list[Check]:
    """The e^{−x}-deformation identities relating 𝔗, inversion and the deformation."""
    order = f.order if order is None else order
    f = f.truncate(order)
    f.require_normalized("identities_310 argument")
    damped = f * exp_series(order, -1)
    tf = t_apply(f)

    ratio = div(TruncSeries.x(order), TruncSeries.one(order) + TruncSeries.x(order))
    left = comp_inverse(t_apply(damped))
    right = compose(comp_inverse(tf), ratio)
    first = compare_series("tchain.inverse_of_deformed", left, right, order=order)

    gamma = comp_inverse(damped)
    left = exp(gamma).shift_up().truncate(order)
    phi = comp_inverse(f)
    right = comp_inverse(exp(-phi).shift_up().truncate(order))
    second = compare_series("tchain.exp_of_deformed_inverse", left, right, order=order)

    left = t_apply(t_apply(damped))
    right = t_apply(tf) * (TruncSeries.one(order) - tf)
    third = compare_series("tchain.second_power_of_deformed", left, right, order=order)
    return [first, second, third]


def inverse_roundtrip_check(f: TruncSeries) -> Check:
    """𝔗(𝔗⁻¹f) = f and 𝔗⁻¹(𝔗f) = f."""
    failures = []
    if t_apply(t_inverse(f)) != f:
        failures.append("t_apply after t_inverse")
    if t_inverse(t_apply(f)) != f:
        failures.append("t_inverse after t_apply")
    return Check("tchain.roundtrip", not failures, failures, {"order": f.order})


def rescaling_check(f: TruncSeries, a) -> Check:
    """𝔗(f(Ax)/A) = (𝔗f)(Ax)/A."""
    a = Fraction(a)
    scaled = f.rescale(a) / a
    return compare_series("tchain.rescaling", t_apply(scaled), t_apply(f).rescale(a) / a, a=a)


def first_deviation(f: TruncSeries) -> int | None:
    """Least n ≥ 2 with [xⁿ]f ≠ 0."""
    for n in range(2, f.order + 1):
        if f[n] != 0:
            return n
    return None


def parity_check(f: TruncSeries, k: int) -> Check:
    """At the first deviation n from x: [xⁿ]𝔗^k f = (1−n)^k·[xⁿ]f, lower terms untouched."""
    n = first_deviation(f)
    if n is None:
        return Check("tchain.parity", t_power(f, k) == f, [], {"k": k, "deviation": None})
    image = t_power(f, k)
    failures = [j for j in range(2, n) if image[j] != 0]
    expected = Fraction(1 - n) ** k * f[n]
    if image[n] != expected:
        failures.append(n)
    return Check("tchain.parity", not failures, failures, {"k": k, "deviation": n, "coefficient": image[n]})


def theta_propagation(n: int, theta, k: int, order: int | None = None) -> Check:
    """
    For f = Σ_{j≤n} x^j/j! + θ·x^{n+1}/(n+1)!, the x^{n+1} coefficient of
    𝔗^{2k} f is (1 − n^{2k}(1−θ))/(n+1)! and lower ones stay 1/j!.
    """
    if n < 2:
        raise UsageError("theta_propagation needs n > 1")
    order = n + 1 if order is None else order
    if order < n + 1:
        raise UsageError(f"order {order} must be at least n + 1 = {n + 1}")
    theta = Fraction(theta)
    coeffs = [Fraction(0)] + [Fraction(1, factorial(j)) for j in range(1, n + 1)]
    coeffs.append(theta / factorial(n + 1))
    f = TruncSeries(coeffs, order)
    image = t_power(f, 2 * k)
    expected = (1 - n ** (2 * k) * (1 - theta)) / factorial(n + 1)
    failures = [j for j in range(1, n + 1) if image[j] != Fraction(1, factorial(j))]
    if image[n + 1] != expected:
        failures.append(n + 1)
    return Check(
        "tchain.theta_propagation",
        not failures,
        failures,
        {"n": n, "theta": theta, "k": k, "coefficient": image[n + 1], "expected": expected},
    )


def _tree_series(order: int) -> TruncSeries:
    # −W(−x) = Σ n^{n−1} xⁿ/n!
    return TruncSeries.from_function(
        lambda n: Fraction(n ** (n - 1), factorial(n)) if n else Fraction(0), order
    )


def _catalan_like(order: int, sign: int) -> list[Fraction]:
    # C(2n, n)/(2(2n−1)) with the given sign pattern
    return [Fraction(sign**n * comb(2 * n, n), 2 * (2 * n - 1)) for n in range(1, order + 1)]


def deformed_chain_check(order: int = 12) -> list[Check]:
    """The e^{−x} deformation of the constant chain x ← x ← x and its inverses."""
    one = TruncSeries.one(order)
    x = TruncSeries.x(order)
    xexp = x * exp_series(order, -1)
    geometric = div(x, one - x)
    quadratic = x - x * x
    rational = div(quadratic, one - x.scale(2))
    checks = [
        compare_series("tchain.deformed.xexp", t_apply(xexp), geometric),
        compare_series("tchain.deformed.geometric", t_apply(geometric), quadratic),
        compare_series("tchain.deformed.quadratic", t_apply(quadratic), rational),
        compare_series("tchain.deformed.integral_exp", t_apply(t_inverse(xexp)), xexp),
    ]

    inv_quadratic = comp_inverse(quadratic)
    root = pow_scalar(one - x.scale(4), Fraction(1, 2))
    checks.append(compare_series("tchain.deformed.inv_quadratic_sqrt", inv_quadratic, (one - root) / 2))
    checks.append(
        compare_sequences("tchain.deformed.inv_quadratic_coeffs", inv_quadratic.coeffs[1:], _catalan_like(order, 1), start=1)
    )

    checks.append(compare_series("tchain.deformed.inv_geometric", comp_inverse(geometric), div(x, one + x)))
    checks.append(compare_series("tchain.deformed.inv_xexp", comp_inverse(xexp), _tree_series(order)))

    inv_rational = comp_inverse(rational)
    root = pow_scalar(one + (x * x).scale(4), Fraction(1, 2))
    checks.append(compare_series("tchain.deformed.inv_rational_sqrt", inv_rational, (one + x.scale(2) - root) / 2))
    expected = [Fraction(0)] * (order + 1)
    expected[1] = Fraction(1)
    for n, c in enumerate(_catalan_like(order // 2, -1), start=1):
        expected[2 * n] += c
    checks.append(compare_sequences("tchain.deformed.inv_rational_coeffs", inv_rational.coeffs, expected))
    return checks


def sinh_chain_check(p=1, order: int = 15) -> list[Check]:
    """sinh(2px)/(2p) ← tanh(px)/p ← sinh(px)/p ← 2·tanh(px/2)/p."""
    p = Fraction(p)
    sinh = sinh_series(order, p)
    tanh = tanh_series(order, p)
    return [
        compare_series("tchain.sinh.forward", t_apply(sinh), tanh, p=p),
        compare_series("tchain.sinh.double", t_apply(tanh), sinh_series(order, 2 * p), p=p),
        compare_series("tchain.sinh.inverse", t_inverse(sinh), tanh_series(order, p / 2), p=p),
    ]


# ---------------------------------------------------------------------------
# Seeds
# ---------------------------------------------------------------------------


def _x(order: int, p: Fraction) -> TruncSeries:
    return TruncSeries.x(order)


def _xexp(order: int, p: Fraction) -> TruncSeries:
    return TruncSeries.x(order) * exp_series(order, -p)


def _quadratic(order: int, p: Fraction) -> TruncSeries:
    x = TruncSeries.x(order)
    return x - (x * x).scale(p)


def _cubic(order: int, p: Fraction) -> TruncSeries:
    x = TruncSeries.x(order)
    return x + (x * x * x).scale(p)


SEEDS: dict[str, Callable[[int, Fraction], TruncSeries]] = {
    "x": _x,
    "exp": lambda order, p: expm1_series(order, p),
    "xexp": _xexp,
    "x-x2": _quadratic,
    "x+x3": _cubic,
    "sin": lambda order, p: sin_series(order),
    "sinh": lambda order, p: sinh_series(order, p),
}


def seed_series(name: str, order: int, p=1) -> TruncSeries:
    """Named normalized seeds; ``p`` scales the exponential-type seeds."""
    try:
        build = SEEDS[name]
    except KeyError:
        raise UsageError(f"unknown seed {name!r}", [f"known: {', '.join(sorted(SEEDS))}"]) from None
    return build(order, Fraction(p))


def random_normalized(rng: random.Random, order: int, bound: int = 5) -> TruncSeries:
    """x + Σ r_n xⁿ with small random rationals r_n."""
    coeffs = [Fraction(0), Fraction(1)]
    for _ in range(2, order + 1):
        coeffs.append(Fraction(rng.randint(-bound, bound), rng.randint(1, bound)))
    return TruncSeries(coeffs, order)
