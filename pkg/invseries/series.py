"""
Exact truncated formal power series.

A ``TruncSeries`` stores c_0..c_N with an explicit truncation order N.
Coefficients are ``Fraction`` or ``AlphaPoly``; every operation is exact
and returns a new series. Binary operations require equal orders, callers
truncate first.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Iterable, Union

from invseries.canonical import encode_scalar
from invseries.errors import ConsistencyError, DomainError, SingularityError, UsageError
from invseries.poly import AlphaPoly

logger = logging.getLogger("invseries")

Coeff = Union[Fraction, AlphaPoly]

ZERO = Fraction(0)
ONE = Fraction(1)


def _coerce(c) -> Coeff:
    if isinstance(c, (Fraction, AlphaPoly)):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise UsageError(f"unsupported coefficient type {type(c).__name__}")


def _is_zero(c: Coeff) -> bool:
    return c == 0


def _unit_inverse(c: Coeff) -> Fraction:
    """Inverse of a constant term, which must be a nonzero rational."""
    if isinstance(c, AlphaPoly):
        if not c.is_constant() or c.is_zero():
            raise SingularityError(f"constant term {c} is not invertible in Q[{c.var}]")
        c = c.coeffs[0]
    if c == 0:
        raise SingularityError("constant term is zero")
    return 1 / c


class TruncSeries:
    """Power series c_0 + c_1 x + ... + c_N x^N, known exactly up to x^N."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        values = [_coerce(c) for c in coeffs]
        if order is None:
            order = len(values) - 1
        if order < 0:
            raise UsageError("series order must be non-negative")
        if len(values) <= order:
            values.extend([ZERO] * (order + 1 - len(values)))
        self.coeffs: tuple[Coeff, ...] = tuple(values[: order + 1])
        self.order = order

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, order: int) -> "TruncSeries":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "TruncSeries":
        return cls([ONE], order)

    @classmethod
    def x(cls, order: int) -> "TruncSeries":
        return cls([ZERO, ONE], order)

    @classmethod
    def constant(cls, c, order: int) -> "TruncSeries":
        return cls([c], order)

    @classmethod
    def from_function(cls, fn: Callable[[int], object], order: int) -> "TruncSeries":
        return cls([fn(n) for n in range(order + 1)], order)

    # -- access ------------------------------------------------------------

    def __getitem__(self, n: int) -> Coeff:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def valuation(self) -> int | None:
        for n, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return n
        return None

    def is_normalized(self) -> bool:
        return self.order >= 1 and self.coeffs[0] == 0 and self.coeffs[1] == 1

    def require_normalized(self, what: str = "series") -> None:
        if not self.is_normalized():
            raise DomainError(
                f"{what} must be normalized (c0 = 0, c1 = 1)",
                [f"c0 = {self.coeffs[0]}", f"c1 = {self.coeffs[1] if self.order >= 1 else 'n/a'}"],
            )

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise UsageError(f"cannot raise truncation order {self.order} to {order}")
        return TruncSeries(self.coeffs[: order + 1], order)

    def _same_order(self, other: "TruncSeries") -> None:
        if self.order != other.order:
            raise UsageError(
                f"order mismatch: {self.order} vs {other.order}",
                ["truncate the longer operand first"],
            )

    # -- ring operations -----------------------------------------------------

    def __add__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self + TruncSeries.constant(_coerce(other), self.order)
        self._same_order(other)
        return TruncSeries([a + b for a, b in zip(self.coeffs, other.coeffs)], self.order)

    __radd__ = __add__

    def __neg__(self) -> "TruncSeries":
        return TruncSeries([-c for c in self.coeffs], self.order)

    def __sub__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            other = TruncSeries.constant(_coerce(other), self.order)
        return self + (-other)

    def __rsub__(self, other) -> "TruncSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        self._same_order(other)
        n = self.order
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(n + 1):
            acc = ZERO
            for i in range(k + 1):
                ai = a[i]
                if _is_zero(ai):
                    continue
                bj = b[k - i]
                if _is_zero(bj):
                    continue
                acc = acc + ai * bj
            out.append(acc)
        return TruncSeries(out, n)

    def __rmul__(self, other) -> "TruncSeries":
        return self.scale(other)

    def scale(self, c) -> "TruncSeries":
        c = _coerce(c)
        return TruncSeries([a * c for a in self.coeffs], self.order)

    def __truediv__(self, other) -> "TruncSeries":
        if not isinstance(other, TruncSeries):
            return self.scale(_unit_inverse(_coerce(other)))
        return div(self, other)

    def __pow__(self, k: int) -> "TruncSeries":
        if k < 0:
            return div(TruncSeries.one(self.order), self ** (-k))
        result = TruncSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return self.order == other.order and all(
            a == b for a, b in zip(self.coeffs, other.coeffs)
        )

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    # -- calculus ------------------------------------------------------------

    def derivative(self) -> "TruncSeries":
        """d/dx; the result is known to order N−1."""
        if self.order == 0:
            raise UsageError("cannot differentiate an order-0 series")
        return TruncSeries([n * self.coeffs[n] for n in range(1, self.order + 1)], self.order - 1)

    def integrate(self) -> "TruncSeries":
        """Antiderivative with zero constant term; known to order N+1."""
        return TruncSeries(
            [ZERO] + [c / (n + 1) for n, c in enumerate(self.coeffs)],
            self.order + 1,
        )

    def shift_down(self) -> "TruncSeries":
        """f(x)/x for a series with zero constant term; order drops by one."""
        if not _is_zero(self.coeffs[0]):
            raise DomainError("shift_down needs a zero constant term")
        return TruncSeries(self.coeffs[1:], self.order - 1)

    def shift_up(self) -> "TruncSeries":
        """x·f(x); order rises by one."""
        return TruncSeries((ZERO,) + self.coeffs, self.order + 1)

    def rescale(self, a) -> "TruncSeries":
        """f(a·x)."""
        a = Fraction(a)
        return TruncSeries([c * a**n for n, c in enumerate(self.coeffs)], self.order)

    def compose(self, g: "TruncSeries") -> "TruncSeries":
        return compose(self, g)

    def exp(self) -> "TruncSeries":
        return exp(self)

    def log(self) -> "TruncSeries":
        return log(self)

    def pow_scalar(self, s) -> "TruncSeries":
        return pow_scalar(self, s)

    def comp_inverse(self) -> "TruncSeries":
        return comp_inverse(self)

    def map_coeffs(self, fn: Callable[[Coeff], object]) -> "TruncSeries":
        return TruncSeries([fn(c) for c in self.coeffs], self.order)

    # -- rendering -------------------------------------------------------------

    def to_dict(self) -> dict:
        return {"order": self.order, "coeffs": [encode_scalar(c) for c in self.coeffs]}

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.order >= 8 else ""
        return f"TruncSeries([{shown}{more}], order={self.order})"


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def div(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    """a / b with b(0) invertible."""
    a._same_order(b)
    inv0 = _unit_inverse(b.coeffs[0])
    q: list[Coeff] = []
    for n in range(a.order + 1):
        acc = a.coeffs[n]
        for k in range(1, n + 1):
            bk = b.coeffs[k]
            if not _is_zero(bk):
                acc = acc - bk * q[n - k]
        q.append(acc * inv0)
    return TruncSeries(q, a.order)


def compose(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    """f(g(x)) by Horner's scheme; g must have zero constant term."""
    f._same_order(g)
    if not _is_zero(g.coeffs[0]):
        raise DomainError("compose: inner series must satisfy g(0) = 0")
    result = TruncSeries.constant(f.coeffs[-1], f.order)
    for c in reversed(f.coeffs[:-1]):
        result = result * g + c
    return result


def exp(f: TruncSeries) -> TruncSeries:
    """exp(f) for f(0) = 0, via h' = f'h."""
    if not _is_zero(f.coeffs[0]):
        raise DomainError("exp needs a zero constant term")
    h: list[Coeff] = [ONE]
    for n in range(1, f.order + 1):
        acc = ZERO
        for k in range(1, n + 1):
            fk = f.coeffs[k]
            if not _is_zero(fk):
                acc = acc + fk * h[n - k] * k
        h.append(acc / n)
    return TruncSeries(h, f.order)


def log(f: TruncSeries) -> TruncSeries:
    """log(f) for f(0) = 1."""
    if f.coeffs[0] != 1:
        raise DomainError("log needs constant term 1", [f"c0 = {f.coeffs[0]}"])
    out: list[Coeff] = [ZERO]
    for n in range(1, f.order + 1):
        acc = f.coeffs[n] * n
        for k in range(1, n):
            fk = f.coeffs[n - k]
            if not _is_zero(fk):
                acc = acc - out[k] * fk * k
        out.append(acc / n)
    return TruncSeries(out, f.order)


def pow_scalar(f: TruncSeries, s) -> TruncSeries:
    """f**s = exp(s·log f) for f(0) = 1; s may be rational or an AlphaPoly."""
    if f.coeffs[0] != 1:
        raise DomainError("pow_scalar needs constant term 1", [f"c0 = {f.coeffs[0]}"])
    return exp(log(f).scale(s))


def comp_inverse(f: TruncSeries, check: bool = True) -> TruncSeries:
    """
    Compositional inverse by Lagrange inversion.

    [x^n] f^{inv} = (1/n)·[t^{n-1}] (t/f(t))^n. When ``check`` is set the
    result is verified by composing back; ``comp_inverse_newton`` is the
    independent route used by the test suites.
    """
    f.require_normalized("comp_inverse argument")
    n_max = f.order
    h = div(TruncSeries.one(n_max - 1), f.shift_down())
    coeffs: list[Coeff] = [ZERO]
    power = h
    for n in range(1, n_max + 1):
        coeffs.append(power.coeffs[n - 1] / n)
        if n < n_max:
            power = power * h
    g = TruncSeries(coeffs, n_max)
    if check and compose(f, g) != TruncSeries.x(n_max):
        raise ConsistencyError("Lagrange inverse fails the composition check")
    logger.debug(f"comp_inverse: order {n_max}")
    return g


def comp_inverse_newton(f: TruncSeries) -> TruncSeries:
    """Compositional inverse by Newton iteration g <- g - (f(g) - x)/f'(g)."""
    f.require_normalized("comp_inverse argument")
    n_max = f.order
    identity = TruncSeries.x(n_max)
    if n_max == 1:
        return identity
    fprime = f.derivative()
    g = identity
    for _ in range(n_max.bit_length() + 2):
        residual = compose(f, g) - identity
        if residual.valuation() is None:
            return g
        slope = compose(fprime, g.truncate(n_max - 1))
        g = g - div(residual.shift_down(), slope).shift_up()
    if compose(f, g) != identity:
        raise ConsistencyError("Newton inversion did not converge")
    return g


# ---------------------------------------------------------------------------
# Elementary series
# ---------------------------------------------------------------------------


def exp_series(order: int, a=1) -> TruncSeries:
    """e^{a x}."""
    a = Fraction(a)
    return TruncSeries.from_function(lambda n: a**n / factorial(n), order)


def expm1_series(order: int, a=1) -> TruncSeries:
    """(e^{a x} − 1)/a, the normalized exponential; equals x when a = 0."""
    a = Fraction(a)
    return TruncSeries.from_function(
        lambda n: ZERO if n == 0 else a ** (n - 1) / factorial(n), order
    )


def log1p_series(order: int) -> TruncSeries:
    """ln(1 + x)."""
    return TruncSeries.from_function(
        lambda n: ZERO if n == 0 else Fraction((-1) ** (n - 1), n), order
    )


def geometric_series(order: int, a=1) -> TruncSeries:
    """1/(1 − a x)."""
    a = Fraction(a)
    return TruncSeries.from_function(lambda n: a**n, order)


def sin_series(order: int) -> TruncSeries:
    return TruncSeries.from_function(
        lambda n: Fraction((-1) ** ((n - 1) // 2), factorial(n)) if n % 2 else ZERO, order
    )


def cos_series(order: int) -> TruncSeries:
    return TruncSeries.from_function(
        lambda n: ZERO if n % 2 else Fraction((-1) ** (n // 2), factorial(n)), order
    )


def sinh_series(order: int, a=1) -> TruncSeries:
    """sinh(a x)/a."""
    a = Fraction(a)
    return TruncSeries.from_function(
        lambda n: a ** (n - 1) / factorial(n) if n % 2 else ZERO, order
    )


def tanh_series(order: int, a=1) -> TruncSeries:
    """tanh(a x)/a."""
    a = Fraction(a)
    cosh = TruncSeries.from_function(lambda n: ZERO if n % 2 else a**n / factorial(n), order)
    return div(sinh_series(order, a), cosh)


# ---------------------------------------------------------------------------
# Scalar combinatorics
# ---------------------------------------------------------------------------


def gen_binomial(r, k: int):
    """r(r−1)…(r−k+1)/k! for rational or polynomial r."""
    if k < 0:
        return ZERO
    result = ONE
    for j in range(k):
        result = result * (r - j)
    return result / factorial(k)


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with B_1 = −1/2, from Σ_{j<=n} C(n+1, j) B_j = 0."""
    if n == 0:
        return ONE
    total = sum((comb(n + 1, j) * bernoulli_number(j) for j in range(n)), ZERO)
    return -total / (n + 1)


@lru_cache(maxsize=32)
def _bernoulli_generating(order: int) -> TruncSeries:
    # t/(e^t − 1)
    return div(TruncSeries.one(order), expm1_series(order + 1).shift_down())


def bernoulli_poly(q: int, x) -> Fraction:
    """B_q(x) as q!·[t^q] t·e^{xt}/(e^t − 1)."""
    x = Fraction(x)
    series = exp_series(q, x) * _bernoulli_generating(q)
    return series.coeffs[q] * factorial(q)


def composition_sum(weights: Callable[[int], Fraction], total: int, parts: int) -> Fraction:
    """
    Σ w(q_1)…w(q_m) over compositions q_1 + … + q_m = total with q_i ≥ 1.

    Evaluated by the recursion C(t, m) = Σ_q w(q)·C(t − q, m − 1).
    """

    @lru_cache(maxsize=None)
    def count(t: int, m: int) -> Fraction:
        if m == 0:
            return ONE if t == 0 else ZERO
        if t < m:
            return ZERO
        return sum((weights(q) * count(t - q, m - 1) for q in range(1, t - m + 2)), ZERO)

    return count(total, parts)
