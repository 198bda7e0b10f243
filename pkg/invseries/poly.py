"""
Dense univariate polynomials over the rationals.

An ``AlphaPoly`` holds coefficients in ascending degree order. It is used
for the formal parameter α of binomial-type sequences, for the exponent s
of the A_k(s) polynomials and for the parameter p of the pyramid tables.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

from invseries.errors import ConsistencyError, SingularityError, UsageError

Scalar = Union[int, Fraction]


def _normalize(coeffs: list[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class AlphaPoly:
    """Immutable polynomial with Fraction coefficients."""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable[Scalar] = (), var: str = "α"):
        self.coeffs = _normalize([Fraction(c) for c in coeffs])
        self.var = var

    @classmethod
    def constant(cls, c: Scalar, var: str = "α") -> "AlphaPoly":
        return cls([c], var)

    @classmethod
    def variable(cls, var: str = "α") -> "AlphaPoly":
        return cls([0, 1], var)

    @classmethod
    def monomial(cls, degree: int, c: Scalar = 1, var: str = "α") -> "AlphaPoly":
        return cls([0] * degree + [c], var)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    # -- arithmetic --------------------------------------------------------

    def _lift(self, other: "AlphaPoly | Scalar") -> "AlphaPoly":
        if isinstance(other, AlphaPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return AlphaPoly([other], self.var)
        return NotImplemented

    def __add__(self, other: "AlphaPoly | Scalar") -> "AlphaPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return AlphaPoly([self.coeff(i) + other.coeff(i) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self) -> "AlphaPoly":
        return AlphaPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other: "AlphaPoly | Scalar") -> "AlphaPoly":
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Scalar) -> "AlphaPoly":
        return (-self) + other

    def __mul__(self, other: "AlphaPoly | Scalar") -> "AlphaPoly":
        if isinstance(other, (int, Fraction)):
            return AlphaPoly([c * other for c in self.coeffs], self.var)
        if not isinstance(other, AlphaPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return AlphaPoly((), self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return AlphaPoly(out, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other: "AlphaPoly | Scalar") -> "AlphaPoly":
        """Division by a scalar or by a nonzero constant polynomial."""
        if isinstance(other, AlphaPoly):
            if not other.is_constant() or other.is_zero():
                raise SingularityError(f"cannot divide by non-constant polynomial {other}")
            other = other.coeffs[0]
        if other == 0:
            raise SingularityError("division of polynomial by zero")
        return AlphaPoly([c / Fraction(other) for c in self.coeffs], self.var)

    def __pow__(self, k: int) -> "AlphaPoly":
        if k < 0:
            raise UsageError("negative polynomial power")
        result = AlphaPoly([1], self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlphaPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _normalize([Fraction(other)])
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- calculus and substitution -----------------------------------------

    def __call__(self, x):
        """Horner evaluation at a rational or at another polynomial."""
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    def derivative(self) -> "AlphaPoly":
        return AlphaPoly([k * c for k, c in enumerate(self.coeffs)][1:], self.var)

    def shift(self, c: Scalar) -> "AlphaPoly":
        """The polynomial q(α) = self(α + c)."""
        moved = AlphaPoly([c, 1], self.var)
        result = AlphaPoly((), self.var)
        for coeff in reversed(self.coeffs):
            result = result * moved + coeff
        return result

    def rescale(self, c: Scalar) -> "AlphaPoly":
        """The polynomial q(α) = self(c·α)."""
        c = Fraction(c)
        return AlphaPoly([a * c**k for k, a in enumerate(self.coeffs)], self.var)

    def divmod_linear(self, root: Scalar) -> tuple["AlphaPoly", Fraction]:
        """Synthetic division by (α − root); returns (quotient, remainder)."""
        root = Fraction(root)
        if self.is_zero():
            return AlphaPoly((), self.var), Fraction(0)
        acc = Fraction(0)
        quotient: list[Fraction] = []
        for c in reversed(self.coeffs):
            acc = acc * root + c
            quotient.append(acc)
        remainder = quotient.pop()
        return AlphaPoly(reversed(quotient), self.var), remainder

    def exact_div_linear(self, root: Scalar) -> "AlphaPoly":
        """Division by (α − root) that must leave no remainder."""
        quotient, remainder = self.divmod_linear(root)
        if remainder != 0:
            raise ConsistencyError(
                f"nonzero remainder {remainder} dividing by ({self.var} - {root})",
                [f"dividend: {self}"],
            )
        return quotient

    def div_var(self) -> "AlphaPoly":
        """Exact division by the variable itself (requires zero constant term)."""
        return self.exact_div_linear(0)

    # -- rendering -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"AlphaPoly({[str(c) for c in self.coeffs]}, var={self.var!r})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*{self.var}")
            else:
                terms.append(f"{c}*{self.var}^{k}")
        return " + ".join(terms)


def falling_factorial(k: int, var: str = "α") -> AlphaPoly:
    """(α)_k = α(α−1)…(α−k+1)."""
    result = AlphaPoly([1], var)
    for j in range(k):
        result = result * AlphaPoly([-j, 1], var)
    return result
