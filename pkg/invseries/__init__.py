"""
invseries - exact truncated power series and the inverse logarithmic derivative.

Exact arithmetic over the rationals (and over Q[α]) for power series,
compositional inversion and the operator 𝔗f = f/f′, with the
Ramanujan-Soldner coefficients, the M(s) pipeline, the number pyramid and
the p-family built on top, plus mpmath numerics with error estimates.

Quick Start:
    from invseries import TruncSeries, comp_inverse, t_apply, find_period
    from invseries.series import expm1_series

    f = expm1_series(12, 3)          # (e^{3x} − 1)/3
    find_period(f)                   # 2
    comp_inverse(TruncSeries.x(8))   # x
"""

from invseries.binomial import BinomialSequence, from_generator
from invseries.checks import Check
from invseries.config import RunConfig
from invseries.errors import (
    AccuracyError,
    BranchError,
    ConsistencyError,
    DomainError,
    InvSeriesError,
    SingularityError,
    UsageError,
)
from invseries.poly import AlphaPoly
from invseries.series import TruncSeries, comp_inverse, compose
from invseries.tchain import find_period, t_apply, t_inverse

__version__ = "0.1.0"
__all__ = [
    # Core types
    "TruncSeries",
    "AlphaPoly",
    "BinomialSequence",
    "Check",
    "RunConfig",
    # Operations
    "compose",
    "comp_inverse",
    "t_apply",
    "t_inverse",
    "find_period",
    "from_generator",
    # Exceptions
    "InvSeriesError",
    "UsageError",
    "DomainError",
    "SingularityError",
    "BranchError",
    "ConsistencyError",
    "AccuracyError",
]
