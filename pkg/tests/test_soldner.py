"""
Tests for the ψ coefficients and the b_n series.
"""

from fractions import Fraction

import mpmath
import pytest

from invseries.errors import UsageError
from invseries.soldner import (
    a_coeffs,
    b_coeffs,
    exact_formula,
    exp_psi_identity,
    hypothesis_scan,
    integral_exp_series,
    lagrange_coeffs,
    mellin_check,
    remark24_rhs,
    scale_invariance_check,
    series_remark24,
    series_theorem21,
    sign_check,
    soldner_table,
)


PREC = 64
TERMS = 1000


class TestExactCoefficients:
    """Test a_n by recurrence, formula and Lagrange inversion."""

    def test_first_terms(self):
        """ψ = x − x² + (5/4)x³ − …"""
        assert a_coeffs(3) == [1, -1, Fraction(5, 4)]

    def test_routes_agree(self):
        """The explicit formula and series inversion match the recurrence."""
        a = a_coeffs(10)
        assert [exact_formula(n) for n in range(1, 11)] == a
        assert lagrange_coeffs(10) == a

    def test_generating_series(self):
        """x·exp(∫(e^t − 1)/t) = x + x² + (3/4)x³ + …"""
        g = integral_exp_series(3)
        assert list(g.coeffs) == [0, 1, 1, Fraction(3, 4)]

    def test_signs_alternate(self):
        assert sign_check(a_coeffs(30)).passed

    def test_exp_psi(self):
        """exp(ψ) − 1 = Σ (a_n/n)xⁿ and ψ^{inv} = 𝔗⁻¹(x·e^{−x})."""
        for check in exp_psi_identity(10):
            assert check.passed, check.name

    @pytest.mark.parametrize("c", [2, Fraction(-1, 3)])
    def test_scale_invariance(self, c):
        assert scale_invariance_check(10, c).passed

    def test_needs_a_term(self):
        with pytest.raises(UsageError):
            a_coeffs(0)


class TestBCoefficients:
    """Test the fixed-point b_n."""

    def test_first_value(self):
        """b_1 = e^{−γ}."""
        b = b_coeffs(5, PREC)
        with mpmath.workprec(PREC):
            assert abs(b[0] - mpmath.exp(-mpmath.euler)) < mpmath.mpf(2) ** (8 - PREC)

    def test_matches_exact_rationals(self):
        """b_n = |a_n|·e^{−γn} for the cross-checked range."""
        b = b_coeffs(20, PREC, cross_check=20)
        a = a_coeffs(20)
        with mpmath.workprec(PREC):
            decay = mpmath.exp(-mpmath.euler)
            for n in (1, 7, 20):
                exact = abs(mpmath.mpf(a[n - 1].numerator) / a[n - 1].denominator) * decay**n
                assert abs(b[n - 1] - exact) < mpmath.mpf(2) ** (20 - PREC) * exact

    def test_positive(self):
        assert all(v > 0 for v in b_coeffs(200, PREC))

    def test_table_rows(self):
        """Rows past the exact range leave a_n empty."""
        table = soldner_table(6, PREC, exact_terms=4)
        rows = table.rows()
        assert [r["n"] for r in rows] == [1, 2, 3, 4, 5, 6]
        assert rows[2]["a_n"] == Fraction(5, 4)
        assert rows[5]["a_n"] == ""


class TestSeries:
    """Test the b_n series against their limits."""

    def test_sum_over_n(self):
        """Σ b_n/n → 1."""
        m = series_theorem21("one", TERMS, PREC)
        assert abs(m.value - 1) < mpmath.mpf("3e-3")

    def test_sum_over_n_squared(self):
        """Σ b_n/n² → ln 2."""
        m = series_theorem21("ln2", TERMS, PREC)
        assert abs(m.value - mpmath.log(2)) < mpmath.mpf("1e-5")

    def test_alternating(self):
        """Σ (−1)^{n−1} b_n/n → μ − 1."""
        m = series_theorem21("mu_minus_one", TERMS, PREC)
        assert abs(m.value - mpmath.mpf("0.4513692348833810")) < mpmath.mpf("1e-4")

    def test_conditional_series_is_exploratory(self):
        """The ln μ series reports plain, Cesàro and Euler values."""
        m = series_theorem21("ln_mu_conditional", 200, PREC)
        assert m.detail["exploratory"]
        assert {"plain", "cesaro", "euler"} <= set(m.detail)

    def test_unknown_series(self):
        with pytest.raises(UsageError):
            series_theorem21("pi", 10, PREC)

    def test_cubic_series(self):
        """Σ b_n/n³ matches π²/6 − Σ 1/(4ⁿ(2n+1)²)."""
        m = series_remark24(TERMS, PREC)
        assert m.detail["diff"] < mpmath.mpf("1e-8")

    def test_cubic_closed_form(self):
        """The closed form is about 0.5589."""
        with mpmath.workprec(PREC):
            expected = mpmath.pi**2 / 6 - mpmath.nsum(lambda n: 1 / (4**n * (2 * n + 1) ** 2), [0, mpmath.inf])
            assert abs(remark24_rhs(PREC) - expected) < mpmath.mpf(2) ** (10 - PREC)


class TestExploratory:
    """Test the reported-only scans."""

    def test_hypothesis_scan_is_exploratory(self):
        checks = hypothesis_scan(100, PREC)
        assert len(checks) == 3
        assert all(c.exploratory for c in checks)

    def test_mellin_second_moment(self):
        """Γ(3)·Σ b_n/n² agrees with ∫₀^∞ Ei(−x)² dx within the composed bound."""
        for check in mellin_check(2, PREC, 500):
            assert check.passed, check.name

    def test_mellin_supported_moments(self):
        with pytest.raises(UsageError):
            mellin_check(3, PREC, 10)
