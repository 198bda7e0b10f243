"""
Tests for binomial-type polynomial sequences.
"""

import random
from fractions import Fraction

import pytest

from invseries.binomial import (
    ALPHA,
    apply_operator_series,
    convolution_check,
    delta_check,
    deform_by_shift,
    exp_deform,
    from_generator,
    invariants_check,
    log_deform_series,
    t_check,
    tchain_poly_transform,
)
from invseries.errors import DomainError, UsageError
from invseries.poly import AlphaPoly, falling_factorial
from invseries.series import TruncSeries, exp_series, expm1_series, sin_series
from invseries.tchain import random_normalized


N = 8


def generators():
    x = TruncSeries.x(N)
    rng = random.Random(7)
    return {
        "x": x,
        "exp": expm1_series(N),
        "xexp": x * exp_series(N, -1),
        "x-x2": x - x * x,
        "sin": sin_series(N),
        "random": random_normalized(rng, N),
    }


class TestKnownSequences:
    """Test sequences with closed forms."""

    def test_identity_gives_powers(self):
        """f = x gives p_n = αⁿ."""
        seq = from_generator(TruncSeries.x(N))
        for n, p in enumerate(seq.polys):
            assert p == AlphaPoly.monomial(n)

    def test_exponential_gives_falling_factorials(self):
        """f = e^x − 1 gives (α)_n."""
        seq = from_generator(expm1_series(N))
        for n, p in enumerate(seq.polys):
            assert p == falling_factorial(n)

    def test_abel_polynomials(self):
        """f = x·e^{−x} gives α(α + n)^{n−1}."""
        seq = from_generator(TruncSeries.x(N) * exp_series(N, -1))
        for n in range(1, N + 1):
            assert seq[n] == ALPHA * (ALPHA + n) ** (n - 1)

    def test_generator_must_be_normalized(self):
        """f(0) = 0, f′(0) = 1 is required."""
        with pytest.raises(DomainError):
            from_generator(TruncSeries([0, 2], N))

    def test_order_cannot_exceed_generator(self):
        """A generator known to N cannot give p_{N+1}."""
        with pytest.raises(UsageError):
            from_generator(TruncSeries.x(N), N + 1)


class TestIdentities:
    """Test the identity suite on several generators."""

    @pytest.mark.parametrize("name", ["x", "exp", "xexp", "x-x2", "sin", "random"])
    def test_suite(self, name):
        """Invariants, convolution, delta, 𝔗 and transform identities hold exactly."""
        seq = from_generator(generators()[name])
        for check in (
            invariants_check(seq),
            convolution_check(seq),
            delta_check(seq),
            t_check(seq),
            tchain_poly_transform(seq),
        ):
            assert check.passed, (check.name, check.failures)

    @pytest.mark.parametrize("name", ["exp", "x-x2", "random"])
    def test_exp_deform_routes_agree(self, name):
        """The shift formula reproduces the sequence of f·e^{−x}."""
        seq = from_generator(generators()[name])
        deformed = exp_deform(seq)
        assert deformed.polys == deform_by_shift(seq)

    def test_deform_of_x_is_abel(self):
        """x deformed by e^{−x} gives the Abel polynomials."""
        seq = from_generator(TruncSeries.x(N))
        shifted = deform_by_shift(seq)
        assert shifted[3] == ALPHA * (ALPHA + 3) ** 2

    @pytest.mark.parametrize("a", [1, Fraction(1, 2), -2])
    def test_log_deform_series(self, a):
        """The coefficient formula matches −ln(1 − A·x·e^{γ})."""
        seq = from_generator(generators()["sin"])
        series, check = log_deform_series(seq, a)
        assert check.passed
        assert series[1] == a

    def test_operator_too_short(self):
        """An operator series must reach the polynomial degree."""
        with pytest.raises(UsageError):
            apply_operator_series(TruncSeries.x(2), AlphaPoly.monomial(5))

    def test_operator_application(self):
        """(d/dα)·α³ = 3α² via the series x."""
        assert apply_operator_series(TruncSeries.x(4), AlphaPoly.monomial(3)) == AlphaPoly.monomial(2, 3)

    def test_serialization(self):
        """Polynomials serialize as n plus ascending coefficients."""
        data = from_generator(expm1_series(3)).to_dict()
        assert data["polys"][2] == {"n": 2, "coeffs": (Fraction(0), Fraction(-1), Fraction(1))}
