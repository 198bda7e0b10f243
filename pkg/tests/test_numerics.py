"""
Tests for the numeric layer: constants, special functions, quadrature.
"""

from fractions import Fraction

import mpmath
import pytest

from invseries.errors import AccuracyError, BranchError, SingularityError, UsageError
from invseries.numerics import (
    Measured,
    constants,
    digits_for,
    ei,
    eval_series,
    euler_gamma_maclaurin,
    lambert_w,
    li,
    ln2_series,
    mu_root,
    pi_agm,
    quad,
    richardson,
    to_mpf,
)


PREC = 128


def close(a, b, bits=PREC - 8):
    return abs(a - b) <= mpmath.mpf(2) ** (-bits) * max(1, abs(b))


class TestConstants:
    """Test γ, π and ln 2 with their second routes."""

    def test_second_routes(self):
        """Euler-Maclaurin, AGM and atanh agree with mpmath."""
        with mpmath.workprec(PREC + 20):
            gamma, bound = euler_gamma_maclaurin(PREC)
            assert close(gamma, +mpmath.euler)
            assert bound < mpmath.mpf(2) ** (-PREC)
            assert close(pi_agm(PREC), +mpmath.pi)
            assert close(ln2_series(PREC), +mpmath.ln2)

    def test_constant_set(self):
        """constants() returns validated values and renders them."""
        consts = constants(PREC)
        assert consts.prec == PREC
        assert mpmath.nstr(consts.gamma, 10) == "0.5772156649"
        rendered = consts.to_dict()
        assert rendered["ln2"].startswith("0.69314718")

    def test_precision_limits(self):
        """Precision outside [16, 4096] is a usage error."""
        with pytest.raises(UsageError):
            constants(8)

    def test_digits_for(self):
        """256 bits carry about 77 decimal digits."""
        assert 76 <= digits_for(256) <= 78


class TestSpecialFunctions:
    """Test Ei, li, μ and Lambert W against mpmath."""

    @pytest.mark.parametrize("x", ["0.5", "-0.5", "3", "-7", "25"])
    def test_ei_series(self, x):
        """Power-series Ei agrees with mpmath.ei."""
        with mpmath.workprec(PREC + 20):
            assert close(ei(x, PREC), mpmath.ei(mpmath.mpf(x)))

    def test_ei_asymptotic_branch(self):
        """Large negative arguments use the asymptotic expansion."""
        with mpmath.workprec(120):
            value, bound = ei(-200, 64, with_bound=True)
            assert abs(value - mpmath.ei(-200)) <= bound + mpmath.mpf(2) ** (-60) * abs(value)

    def test_ei_pole(self):
        """Ei(0) is a singularity."""
        with pytest.raises(SingularityError):
            ei(0)

    def test_li(self):
        """li(x) agrees with mpmath.li."""
        with mpmath.workprec(PREC + 20):
            assert close(li(10, PREC), mpmath.li(10))

    def test_mu_root(self):
        """μ = 1.4513692348..., the zero of li."""
        mu = mu_root(PREC)
        with mpmath.workprec(PREC + 20):
            assert abs(mu - mpmath.mpf("1.451369234883381050283968485892027449493")) < mpmath.mpf(10) ** -30
            assert abs(mpmath.li(mu)) < mpmath.mpf(2) ** (10 - PREC)

    @pytest.mark.parametrize("x", ["-0.3", "-0.1", "0.5", "2", "10"])
    def test_lambert_w(self, x):
        """Principal branch agrees with mpmath.lambertw."""
        with mpmath.workprec(PREC + 20):
            assert close(lambert_w(x, PREC), mpmath.lambertw(mpmath.mpf(x)).real)

    def test_lambert_w_branch_point(self):
        """Arguments at or below −1/e are outside the principal branch."""
        with pytest.raises(BranchError):
            lambert_w(-1)


class TestQuadrature:
    """Test the quadrature wrapper."""

    def test_finite_interval(self):
        """∫₀¹ x² dx = 1/3."""
        m = quad(lambda x: x * x, 0, 1, PREC)
        assert isinstance(m, Measured)
        with mpmath.workprec(PREC + 20):
            assert abs(m.value - mpmath.mpf(1) / 3) <= m.error + mpmath.mpf(2) ** (-PREC // 2)

    def test_infinite_interval(self):
        """∫₀^∞ e^{−x} dx = 1."""
        m = quad(lambda x: mpmath.exp(-x), 0, mpmath.inf, PREC)
        assert abs(m.value - 1) < mpmath.mpf(10) ** -20

    def test_tolerance_failure(self):
        """An impossible tolerance raises AccuracyError carrying a partial result."""
        with pytest.raises(AccuracyError) as info:
            quad(lambda x: mpmath.sqrt(x) * mpmath.sin(1 / x), 0, 1, 64, tol=mpmath.mpf(10) ** -300)
        assert isinstance(info.value.partial, Measured)


class TestSummation:
    """Test series evaluation modes and extrapolation."""

    def test_plain_geometric(self):
        """Σ 2^{−n} over 60 terms is 2 within the last term."""
        coeffs = [Fraction(1, 2**n) for n in range(60)]
        result = eval_series(coeffs, 1, PREC)
        assert abs(result.value - 2) <= 2 * result.error

    def test_euler_alternating(self):
        """Σ (−1)^{n−1}/n = ln 2, Euler-accelerated over the tail."""
        coeffs = [0] + [Fraction((-1) ** (n - 1), n) for n in range(1, 200)]
        result = eval_series(coeffs, 1, PREC, mode="euler", tail_terms=64)
        assert abs(result.value - mpmath.log(2)) < mpmath.mpf(10) ** -12

    def test_cesaro_grandi(self):
        """Grandi's series 1 − 1 + 1 − … has Cesàro mean 1/2."""
        coeffs = [(-1) ** n for n in range(1000)]
        result = eval_series(coeffs, 1, PREC, mode="cesaro")
        assert abs(result.value - mpmath.mpf(1) / 2) < mpmath.mpf(10) ** -12

    def test_unknown_mode(self):
        """Only plain, cesaro and euler are known."""
        with pytest.raises(UsageError):
            eval_series([1], mode="borel")

    def test_richardson_linear_error(self):
        """Values 1 + h are extrapolated to 1."""
        hs = [Fraction(1, 2**j) for j in range(1, 6)]
        value, err = richardson(hs, [1 + h for h in hs])
        assert abs(value - 1) < mpmath.mpf(10) ** -12
        assert err < mpmath.mpf(10) ** -12

    def test_to_mpf_fraction(self):
        """Fractions convert exactly at the working precision."""
        with mpmath.workprec(PREC):
            assert to_mpf(Fraction(1, 4)) == mpmath.mpf("0.25")
