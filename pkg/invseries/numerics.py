"""
Arbitrary-precision numerics on top of mpmath.

Constants come from mpmath and are validated against hand-written second
routes (Euler-Maclaurin for γ, the Gauss-Legendre AGM for π, an atanh
series for ln 2) and against embedded reference digits. Ei, li, μ and the
principal Lambert W are evaluated here in mpf arithmetic; tests compare
them with mpmath's own implementations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Sequence

import mpmath

from invseries.errors import AccuracyError, BranchError, ConsistencyError, SingularityError, UsageError

logger = logging.getLogger("invseries")

DEFAULT_PREC = 256
MAX_PREC = 4096

# Cross-check data only; never returned as a result.
_GAMMA_REFERENCE = "0.577215664901532860606512090082402431042159335939923598805767"
_PI_REFERENCE = "3.14159265358979323846264338327950288419716939937510582097494"
_REFERENCE_DIGITS = 55


def digits_for(prec: int) -> int:
    return max(15, int(prec * 0.30103))


def to_mpf(value: Any) -> mpmath.mpf:
    """Convert int, Fraction, str or mpf to mpf at the current precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


@dataclass
class Measured:
    """A big-float value with an error estimate."""

    value: mpmath.mpf
    error: mpmath.mpf
    prec: int
    detail: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "value": mpmath.nstr(self.value, digits_for(self.prec), strip_zeros=False),
            "error": mpmath.nstr(self.error, 6),
            "prec": self.prec,
        }
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class ConstantSet:
    gamma: mpmath.mpf
    pi: mpmath.mpf
    ln2: mpmath.mpf
    prec: int

    def to_dict(self) -> dict[str, Any]:
        digits = digits_for(self.prec)
        return {
            "gamma": mpmath.nstr(self.gamma, digits),
            "pi": mpmath.nstr(self.pi, digits),
            "ln2": mpmath.nstr(self.ln2, digits),
            "prec": self.prec,
        }


def _check_prec(prec: int) -> None:
    if not 16 <= prec <= MAX_PREC:
        raise UsageError(f"precision {prec} bits outside [16, {MAX_PREC}]")


# ---------------------------------------------------------------------------
# Constants
# ---------------------------------------------------------------------------


def euler_gamma_maclaurin(prec: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    """
    γ = H_N − ln N − 1/(2N) + Σ B_{2k}/(2k N^{2k}), truncated at the first
    term below 2^-(prec+10). Returns (value, bound on the remainder).
    """
    n = int((prec + 20) * 0.1104) + 10
    harmonic = sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))
    with mpmath.workprec(prec + 30):
        eps = mpmath.mpf(2) ** (-(prec + 10))
        value = to_mpf(harmonic) - mpmath.log(n) - mpmath.mpf(1) / (2 * n)
        n_sq = mpmath.mpf(n) ** 2
        power = n_sq
        bound = mpmath.mpf(1)
        k = 1
        while True:
            term = mpmath.bernoulli(2 * k) / (2 * k * power)
            if abs(term) < eps:
                bound = abs(term)
                break
            value += term
            power *= n_sq
            k += 1
    return value, bound


def pi_agm(prec: int) -> mpmath.mpf:
    """Gauss-Legendre arithmetic-geometric mean iteration."""
    with mpmath.workprec(prec + 30):
        a = mpmath.mpf(1)
        b = 1 / mpmath.sqrt(2)
        t = mpmath.mpf(1) / 4
        p = mpmath.mpf(1)
        eps = mpmath.mpf(2) ** (-(prec + 10))
        while abs(a - b) > eps:
            a_next = (a + b) / 2
            b = mpmath.sqrt(a * b)
            t -= p * (a - a_next) ** 2
            a = a_next
            p *= 2
        return (a + b) ** 2 / (4 * t)


def ln2_series(prec: int) -> mpmath.mpf:
    """ln 2 = 2·atanh(1/3) = 2·Σ 1/((2k+1)·3^{2k+1})."""
    with mpmath.workprec(prec + 30):
        eps = mpmath.mpf(2) ** (-(prec + 10))
        total = mpmath.mpf(0)
        power = mpmath.mpf(1) / 3
        k = 0
        while power > eps:
            total += power / (2 * k + 1)
            power /= 9
            k += 1
        return 2 * total


@lru_cache(maxsize=16)
def constants(prec: int = DEFAULT_PREC) -> ConstantSet:
    """γ, π and ln 2 at ``prec`` bits, each confirmed by a second route."""
    _check_prec(prec)
    with mpmath.workprec(prec + 20):
        gamma = +mpmath.euler
        pi = +mpmath.pi
        ln2 = +mpmath.ln2
        tol = mpmath.mpf(2) ** (8 - prec)

        gamma_em, bound = euler_gamma_maclaurin(prec)
        routes = {
            "gamma": (gamma, gamma_em),
            "pi": (pi, pi_agm(prec)),
            "ln2": (ln2, ln2_series(prec)),
        }
        mismatches = [
            f"{name}: |{mpmath.nstr(a, 20)} - {mpmath.nstr(b, 20)}| > 2^(8-{prec})"
            for name, (a, b) in routes.items()
            if abs(a - b) > tol * max(1, abs(a))
        ]
        ref_tol = max(tol, mpmath.mpf(10) ** (-_REFERENCE_DIGITS))
        for name, value, literal in (("gamma", gamma, _GAMMA_REFERENCE), ("pi", pi, _PI_REFERENCE)):
            if abs(value - mpmath.mpf(literal)) > ref_tol:
                mismatches.append(f"{name} disagrees with reference digits")
        if mismatches:
            raise ConsistencyError("constant cross-check failed", mismatches)

    logger.debug(f"constants at {prec} bits validated (Euler-Maclaurin bound {mpmath.nstr(bound, 3)})")
    return ConstantSet(gamma=gamma, pi=pi, ln2=ln2, prec=prec)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def _asymptotic_threshold(prec: int) -> float:
    # optimal truncation of the asymptotic series leaves a relative error near e^{-|x|}
    return max(40.0, prec * 0.6932 + 10)


def ei(x, prec: int = DEFAULT_PREC, with_bound: bool = False):
    """
    Exponential integral Ei(x) = ln|x| + γ + Σ x^k/(k·k!).

    For x below −max(40, prec·ln 2) the asymptotic expansion
    e^x/x·Σ k!/x^k is used with optimal truncation.
    """
    with mpmath.workprec(prec + 20):
        x = to_mpf(x)
        if x == 0:
            raise SingularityError("Ei has a logarithmic pole at 0")
        if x < 0 and -x > _asymptotic_threshold(prec):
            value, bound = _ei_asymptotic(x, prec)
        else:
            value, bound = _ei_series(x, prec)
    return (value, bound) if with_bound else value


def _ei_series(x: mpmath.mpf, prec: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    guard = 30 + (int(abs(x) * 1.4427) if x < 0 else 0)
    with mpmath.workprec(prec + guard):
        gamma = constants(prec).gamma
        eps = mpmath.mpf(2) ** (-(prec + guard))
        total = mpmath.mpf(0)
        term = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            term = term * x / k
            piece = term / k
            total += piece
            if k > abs(x) and abs(piece) <= eps * (1 + abs(total)):
                break
        # tail after k terms is geometric with ratio below |x|/(k+1) < 1
        ratio = abs(x) / (k + 1)
        bound = abs(piece) * ratio / (1 - ratio)
        value = mpmath.log(abs(x)) + gamma + total
    return value, bound


def _ei_asymptotic(x: mpmath.mpf, prec: int) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workprec(prec + 20):
        total = mpmath.mpf(1)
        term = mpmath.mpf(1)
        k = 0
        while True:
            k += 1
            nxt = term * k / x
            if abs(nxt) >= abs(term):
                break
            term = nxt
            total += term
            if abs(term) < mpmath.mpf(2) ** (-(prec + 20)):
                break
        scale = mpmath.exp(x) / x
        return scale * total, abs(scale * term)


def li(x, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Logarithmic integral li(x) = Ei(ln x) for x > 0, x != 1."""
    with mpmath.workprec(prec + 20):
        return ei(mpmath.log(to_mpf(x)), prec)


@lru_cache(maxsize=16)
def mu_root(prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """The Soldner constant μ, the zero of li on (1, ∞)."""
    _check_prec(prec)
    with mpmath.workprec(prec + 20):
        lo, hi = mpmath.mpf("1.4"), mpmath.mpf("1.5")
        f_lo, f_hi = li(lo, prec), li(hi, prec)
        if not (f_lo < 0 < f_hi):
            raise ConsistencyError("li has no sign change on [1.4, 1.5]")
        for _ in range(24):
            mid = (lo + hi) / 2
            if li(mid, prec) < 0:
                lo = mid
            else:
                hi = mid
        x = (lo + hi) / 2
        eps = mpmath.mpf(2) ** (-(prec + 4))
        for _ in range(64):
            step = li(x, prec) * mpmath.log(x)
            x -= step
            if abs(step) < eps:
                break
        residual = abs(li(x, prec))
        if residual > mpmath.mpf(2) ** (16 - prec):
            raise AccuracyError("mu_root: residual too large", partial=x)
    logger.info(f"mu_root: {mpmath.nstr(x, 12)} at {prec} bits")
    return x


def lambert_w(x, prec: int = DEFAULT_PREC) -> mpmath.mpf:
    """Principal branch W(x) for x > −1/e, by Newton iteration on w·e^w = x."""
    with mpmath.workprec(prec + 20):
        x = to_mpf(x)
        branch_gap = mpmath.e * x + 1
        if branch_gap <= 0:
            raise BranchError(f"lambert_w: x = {mpmath.nstr(x, 10)} is not above -1/e")
    guard = 30 + max(0, int(-mpmath.log(branch_gap, 2)))
    with mpmath.workprec(prec + guard):
        x = to_mpf(x)
        if x == 0:
            return mpmath.mpf(0)
        if x < mpmath.mpf("-0.25"):
            p = mpmath.sqrt(2 * (mpmath.e * x + 1))
            w = -1 + p - p**2 / 3 + 11 * p**3 / 72
        elif x < 3:
            w = mpmath.log(1 + x)
        else:
            lx = mpmath.log(x)
            w = lx - mpmath.log(lx)
        eps = mpmath.mpf(2) ** (-(prec + guard // 2))
        for _ in range(200):
            ew = mpmath.exp(w)
            step = (w * ew - x) / (ew * (w + 1))
            w -= step
            if abs(step) <= eps * (1 + abs(w)):
                break
        else:
            raise AccuracyError("lambert_w: Newton iteration did not converge", partial=w)
        residual = abs(w * mpmath.exp(w) - x)
        if residual > mpmath.mpf(2) ** (8 - prec) * max(1, abs(x)):
            raise AccuracyError("lambert_w: residual bound violated", partial=w)
        return w


# ---------------------------------------------------------------------------
# Quadrature and series evaluation
# ---------------------------------------------------------------------------


def quad(
    f: Callable[[mpmath.mpf], mpmath.mpf],
    a,
    b,
    prec: int = DEFAULT_PREC,
    tol=None,
) -> Measured:
    """
    Tanh-sinh quadrature of f over [a, b]; b may be +inf.

    Infinite ranges are split at max(a, 1) and the tail is mapped to
    [0, 1) by x = c + u/(1 − u).
    """
    with mpmath.workprec(prec + 20):
        a = to_mpf(a)
        tol = mpmath.mpf(2) ** (-(prec // 4)) if tol is None else to_mpf(tol)
        pieces: list[tuple[Callable, list]] = []
        if b == mpmath.inf or b == float("inf"):
            c = max(a, mpmath.mpf(1))
            if c > a:
                pieces.append((f, [a, c]))

            def tail(u):
                return f(c + u / (1 - u)) / (1 - u) ** 2

            pieces.append((tail, [mpmath.mpf(0), mpmath.mpf(1)]))
        else:
            pieces.append((f, [a, to_mpf(b)]))

        value = mpmath.mpf(0)
        error = mpmath.mpf(0)
        for integrand, interval in pieces:
            v, e = mpmath.quad(integrand, interval, method="tanh-sinh", error=True)
            value += v
            error += e
        if error > tol:
            raise AccuracyError(
                f"quad: error estimate {mpmath.nstr(error, 3)} above tolerance {mpmath.nstr(tol, 3)}",
                partial=Measured(value, error, prec),
            )
    return Measured(value, error, prec)


@dataclass
class SeriesEvaluation:
    """Result of summing a numeric series, with its partial-sum trace."""

    value: mpmath.mpf
    error: mpmath.mpf
    prec: int
    mode: str
    terms: int
    trace: list[mpmath.mpf] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        digits = digits_for(self.prec)
        return {
            "value": mpmath.nstr(self.value, digits, strip_zeros=False),
            "error": mpmath.nstr(self.error, 6),
            "prec": self.prec,
            "mode": self.mode,
            "terms": self.terms,
            "trace": [mpmath.nstr(v, 12) for v in self.trace],
        }


def _trace_points(partials: Sequence[mpmath.mpf], count: int = 8) -> list[mpmath.mpf]:
    if len(partials) <= count:
        return list(partials)
    step = len(partials) / count
    return [partials[min(len(partials) - 1, int((i + 1) * step) - 1)] for i in range(count)]


def euler_transform(terms: Sequence[mpmath.mpf]) -> tuple[mpmath.mpf, mpmath.mpf]:
    """
    Euler transform of the alternating sum Σ (−1)^j u_j given u_0..u_{K-1}.

    Returns (value, magnitude of the last transformed term).
    """
    diffs = list(terms)
    total = mpmath.mpf(0)
    last = mpmath.mpf(0)
    for k in range(len(diffs)):
        last = (-1) ** k * diffs[0] / mpmath.mpf(2) ** (k + 1)
        total += last
        diffs = [diffs[i + 1] - diffs[i] for i in range(len(diffs) - 1)]
    return total, abs(last)


def eval_series(
    coeffs: Sequence[Any],
    x=1,
    prec: int = DEFAULT_PREC,
    mode: str = "plain",
    tail_terms: int = 64,
) -> SeriesEvaluation:
    """
    Evaluate Σ c_n x^n (n from 0) numerically.

    ``mode`` is ``plain`` (partial sum), ``cesaro`` (mean of partial sums)
    or ``euler`` (partial sum plus Euler-transformed alternating tail over
    the last ``tail_terms`` terms).
    """
    if mode not in ("plain", "cesaro", "euler"):
        raise UsageError(f"unknown summation mode {mode!r}")
    with mpmath.workprec(prec + 20):
        x = to_mpf(x)
        terms = []
        power = mpmath.mpf(1)
        for c in coeffs:
            terms.append(to_mpf(c) * power)
            power *= x
        if not terms:
            return SeriesEvaluation(mpmath.mpf(0), mpmath.mpf(0), prec, mode, 0)

        if mode == "euler":
            k = min(tail_terms, len(terms))
            head = terms[: len(terms) - k]
            tail = terms[len(terms) - k:]
            base = mpmath.fsum(head)
            # tail = Σ t_{m+j} with t_{m+j} = (−1)^j·s·u_j, s the sign of the first tail term
            s = 1 if tail[0] >= 0 else -1
            u = [s * (-1) ** j * t for j, t in enumerate(tail)]
            transformed, err = euler_transform(u)
            value = base + s * transformed
            logger.debug(f"eval_series euler: head {len(head)} terms, tail {len(tail)}")
            return SeriesEvaluation(value, err, prec, mode, len(terms), [base, value])

        partials = []
        running = mpmath.mpf(0)
        for t in terms:
            running += t
            partials.append(running)
        if mode == "cesaro":
            value = mpmath.fsum(partials) / len(partials)
            error = abs(value - partials[-1])
        else:
            value = partials[-1]
            error = abs(terms[-1])
        return SeriesEvaluation(value, error, prec, mode, len(terms), _trace_points(partials))


def richardson(hs: Sequence[Any], values: Sequence[Any]) -> tuple[mpmath.mpf, mpmath.mpf]:
    """
    Polynomial extrapolation to h = 0 (Neville's scheme).

    Returns the extrapolated value and the change contributed by the last
    column, a rough error estimate.
    """
    hs = [to_mpf(h) for h in hs]
    table = [to_mpf(v) for v in values]
    n = len(table)
    previous = table[-1]
    for level in range(1, n):
        for i in range(n - level):
            table[i] = (hs[i + level] * table[i] - hs[i] * table[i + 1]) / (hs[i + level] - hs[i])
        if level == n - 2:
            previous = table[0]
    return table[0], abs(table[0] - previous)
