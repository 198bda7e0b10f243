"""
The number pyramid A^n_{k,m} and its p-deformations.

The coefficients of e^{−αEi(x)}·dⁿ/dxⁿ e^{αEi(x)} form a pyramid whose
faces are the Stirling triangles and the falling factorials. The
p-variants describe T_p^{−α}·dⁿ/dxⁿ T_p^{α} in two bases. Tables built
from the recurrences are compared against a term-by-term differentiation
of the normal form, which knows nothing about the recurrences.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable

from invseries.checks import Check
from invseries.errors import ConsistencyError, UsageError
from invseries.poly import AlphaPoly

logger = logging.getLogger("invseries")

MAX_ORACLE = 9
DEFAULT_SAMPLES = (Fraction(0), Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2))

Layer = dict[tuple[int, int], object]


@dataclass
class PyramidTable:
    """Layers n = 1..n_max; ``layers[n][(k, m)]`` for 1 ≤ k ≤ m ≤ n."""

    n_max: int
    layers: dict[int, Layer] = field(default_factory=dict)

    def entry(self, n: int, k: int, m: int):
        return self.layers[n].get((k, m), 0)

    def slice(self, n: int) -> list[list]:
        """Rows k = 1..n, each listing m = k..n."""
        if n not in self.layers:
            raise UsageError(f"layer {n} outside 1..{self.n_max}")
        return [[self.entry(n, k, m) for m in range(k, n + 1)] for k in range(1, n + 1)]

    def evaluate(self, p) -> "PyramidTable":
        """Substitute a rational p into polynomial entries."""
        p = Fraction(p)
        return PyramidTable(
            self.n_max,
            {n: {key: value(p) for key, value in layer.items()} for n, layer in self.layers.items()},
        )

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "slices": {str(n): self.slice(n) for n in self.layers}}


def _grow(n_max: int, seed, step) -> PyramidTable:
    if n_max < 1:
        raise UsageError("pyramid needs n_max >= 1")
    layers = {1: {(1, 1): seed}}
    for n in range(1, n_max):
        prev = layers[n]
        nxt = {}
        for k in range(1, n + 2):
            for m in range(k, n + 2):
                nxt[(k, m)] = step(prev, k, m)
        layers[n + 1] = nxt
    return PyramidTable(n_max, layers)


def build(n_max: int) -> PyramidTable:
    """A^{n+1}_{k,m} = k·A^n_{k,m} + (m−1)·A^n_{k,m−1} + A^n_{k−1,m−1}."""

    def step(prev: Layer, k: int, m: int) -> int:
        return k * prev.get((k, m), 0) + (m - 1) * prev.get((k, m - 1), 0) + prev.get((k - 1, m - 1), 0)

    table = _grow(n_max, 1, step)
    logger.debug(f"pyramid.build: {n_max} layers")
    return table


def build_p(n_max: int) -> tuple[PyramidTable, PyramidTable]:
    """
    A(p): A^{n+1}_{k,m} = (p(m−k) + k)·A^n_{k,m} + (m−1)·A^n_{k,m−1} + A^n_{k−1,m−1}
    B(p): B^{n+1}_{k,m} = (pm − k)·B^n_{k,m} + (m−1)·B^n_{k,m−1} + B^n_{k−1,m−1}
    """
    zero = AlphaPoly((), "p")

    def step_a(prev: Layer, k: int, m: int) -> AlphaPoly:
        weight = AlphaPoly([k, m - k], "p")
        return (
            prev.get((k, m), zero) * weight
            + prev.get((k, m - 1), zero) * (m - 1)
            + prev.get((k - 1, m - 1), zero)
        )

    def step_b(prev: Layer, k: int, m: int) -> AlphaPoly:
        weight = AlphaPoly([-k, m], "p")
        return (
            prev.get((k, m), zero) * weight
            + prev.get((k, m - 1), zero) * (m - 1)
            + prev.get((k - 1, m - 1), zero)
        )

    seed = AlphaPoly.constant(1, "p")
    return _grow(n_max, seed, step_a), _grow(n_max, seed, step_b)


# ---------------------------------------------------------------------------
# Faces
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def stirling2(n: int, m: int) -> int:
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return m * stirling2(n - 1, m) + stirling2(n - 1, m - 1)


@lru_cache(maxsize=None)
def stirling1(n: int, m: int) -> int:
    """Unsigned Stirling numbers of the first kind."""
    if n == m:
        return 1
    if m == 0 or m > n:
        return 0
    return (n - 1) * stirling1(n - 1, m) + stirling1(n - 1, m - 1)


def faces_check(table: PyramidTable) -> list[Check]:
    """Diagonal = Stirling second kind, last column = Stirling first kind, k = 1 row = (n−1)!/(n−m)!."""
    diagonal, column, row = [], [], []
    for n in range(1, table.n_max + 1):
        for m in range(1, n + 1):
            if table.entry(n, m, m) != stirling2(n, m):
                diagonal.append((n, m))
            if table.entry(n, m, n) != stirling1(n, m):
                column.append((n, m))
            if table.entry(n, 1, m) != factorial(n - 1) // factorial(n - m):
                row.append((n, m))
    positive = [
        (n, k, m) for n, layer in table.layers.items() for (k, m), v in layer.items() if not v > 0
    ]
    detail = {"n_max": table.n_max}
    return [
        Check("pyramid.face_stirling2", not diagonal, diagonal, detail),
        Check("pyramid.face_stirling1", not column, column, detail),
        Check("pyramid.face_falling", not row, row, detail),
        Check("pyramid.positive", not positive, positive, detail),
    ]


# ---------------------------------------------------------------------------
# Differentiation oracle
# ---------------------------------------------------------------------------


def differentiate_normal_form(n_max: int, p=None) -> dict[int, dict[tuple[int, int], Fraction]]:
    """
    Expansion of G_n = F^{−α}·dⁿF^{α}/dxⁿ as Σ c·α^k·e^{kx}·D^{−m}.

    With p None, F = e^{Ei(x)} and D = x (so D′ = 1). With rational p,
    F = T_p and D = Δ_p = (e^{px} − 1)/p, using D′ = 1 + p·D. In both
    cases G_1 = α·e^x·D^{−1} and G_{n+1} = G_n′ + G_n·G_1.
    """
    if not 1 <= n_max <= MAX_ORACLE:
        raise UsageError(f"oracle limited to 1 <= n <= {MAX_ORACLE}")
    slope = Fraction(0) if p is None else Fraction(p)
    current = {(1, 1): Fraction(1)}
    out = {1: dict(current)}
    for n in range(2, n_max + 1):
        nxt: dict[tuple[int, int], Fraction] = {}

        def add(key: tuple[int, int], value: Fraction) -> None:
            nxt[key] = nxt.get(key, Fraction(0)) + value

        for (k, m), c in current.items():
            add((k, m), k * c)                 # d e^{kx}
            add((k, m + 1), -m * c)            # d D^{−m}, the D′ = 1 part
            if slope:
                add((k, m), -m * slope * c)    # the p·D part of D′
            add((k + 1, m + 1), c)             # times α·e^x·D^{−1}
        current = {key: v for key, v in nxt.items() if v != 0}
        out[n] = dict(current)
    return out


def derivative_oracle(n_max: int, variant: str = "ei", p=0) -> PyramidTable:
    """
    Table read off the differentiated normal form.

    ``ei`` gives A^n_{k,m} = (−1)^{m−k}·c_{k,m}; ``tp`` gives the B-basis
    entries B^n_{k,m}(p) = (−1)^{n−k}·c_{k,m} at the rational p.
    """
    if variant == "ei":
        raw = differentiate_normal_form(n_max)
        layers = {n: {(k, m): int(c * (-1) ** (m - k)) for (k, m), c in terms.items()} for n, terms in raw.items()}
    elif variant == "tp":
        raw = differentiate_normal_form(n_max, p)
        layers = {n: {(k, m): c * (-1) ** (n - k) for (k, m), c in terms.items()} for n, terms in raw.items()}
    else:
        raise UsageError(f"unknown oracle variant {variant!r}", ["use 'ei' or 'tp'"])
    return PyramidTable(n_max, layers)


def oracle_check(table: PyramidTable) -> Check:
    """Recurrence table equals the ei-oracle exactly; a mismatch is a hard failure."""
    oracle = derivative_oracle(min(table.n_max, MAX_ORACLE), "ei")
    bad = [
        n
        for n in oracle.layers
        if {key: v for key, v in table.layers[n].items() if v} != oracle.layers[n]
    ]
    if bad:
        raise ConsistencyError("pyramid recurrence disagrees with differentiation", [f"n = {n}" for n in bad])
    return Check("pyramid.oracle_ei", True, [], {"n_max": oracle.n_max})


def _a_basis_expansion(layer: Layer, n: int, p: Fraction) -> dict[tuple[int, int], Fraction]:
    # Σ (−1)^{m−k} α^k e^{(k + p(m−k))x} Δ^{−m} A_{k,m}, rewritten with e^{px} = 1 + pΔ
    out: dict[tuple[int, int], Fraction] = {}
    for (k, m), value in layer.items():
        coeff = Fraction(value(p)) * (-1) ** (m - k)
        for j in range(m - k + 1):
            key = (k, m - j)
            out[key] = out.get(key, Fraction(0)) + coeff * comb(m - k, j) * p**j
    return {key: v for key, v in out.items() if v != 0}


def _b_basis_expansion(layer: Layer, n: int, p: Fraction) -> dict[tuple[int, int], Fraction]:
    out = {(k, m): Fraction(value(p)) * (-1) ** (n - k) for (k, m), value in layer.items()}
    return {key: v for key, v in out.items() if v != 0}


def p_tables_check(n_max: int = 6, samples: Iterable = DEFAULT_SAMPLES) -> list[Check]:
    """
    Both p-tables reproduce the oracle expansion at each sampled p, and the
    A-table at p = 0 collapses to the plain pyramid.
    """
    a_table, b_table = build_p(n_max)
    n_top = min(n_max, MAX_ORACLE)
    a_bad, b_bad = [], []
    for p in samples:
        p = Fraction(p)
        oracle = differentiate_normal_form(n_top, p)
        for n in range(1, n_top + 1):
            target = {key: v for key, v in oracle[n].items() if v != 0}
            if _a_basis_expansion(a_table.layers[n], n, p) != target:
                a_bad.append((str(p), n))
            if _b_basis_expansion(b_table.layers[n], n, p) != target:
                b_bad.append((str(p), n))
    plain = build(n_max)
    collapsed = a_table.evaluate(0)
    collapse_bad = [n for n in plain.layers if collapsed.layers[n] != plain.layers[n]]
    detail = {"n_max": n_max, "samples": [Fraction(p) for p in samples]}
    return [
        Check("pyramid.p_table_a", not a_bad, a_bad, detail),
        Check("pyramid.p_table_b", not b_bad, b_bad, detail),
        Check("pyramid.p_collapse", not collapse_bad, collapse_bad, {"n_max": n_max}),
    ]


def render_slice(table: PyramidTable, n: int) -> str:
    """Layer n as text, one row per k."""
    rows = table.slice(n)
    width = max(len(str(v)) for row in rows for v in row)
    lines = [f"n={n}:"]
    for k, row in enumerate(rows, start=1):
        cells = "  ".join(str(v).rjust(width) for v in row)
        lines.append(f"  k={k}: {cells}")
    return "\n".join(lines)
