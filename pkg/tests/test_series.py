"""
Tests for exact truncated power series.
"""

import random
from fractions import Fraction
from math import factorial

import pytest

from invseries.errors import DomainError, SingularityError, UsageError
from invseries.poly import AlphaPoly
from invseries.series import (
    TruncSeries,
    bernoulli_number,
    bernoulli_poly,
    comp_inverse,
    comp_inverse_newton,
    compose,
    composition_sum,
    cos_series,
    div,
    exp,
    exp_series,
    expm1_series,
    gen_binomial,
    geometric_series,
    log,
    log1p_series,
    pow_scalar,
    sin_series,
    sinh_series,
    tanh_series,
)
from invseries.tchain import random_normalized


N = 10


def random_series(rng, order, constant=None):
    """Random rational coefficients; the constant term is kept when given."""
    coeffs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(order + 1)]
    if constant is not None:
        coeffs[0] = Fraction(constant)
    return TruncSeries(coeffs, order)


class TestConstruction:
    """Test constructors and validation."""

    def test_padding_to_order(self):
        """Short coefficient lists are padded with zeros."""
        s = TruncSeries([1, 2], 4)
        assert s.coeffs == (1, 2, 0, 0, 0)
        assert s.order == 4

    def test_normalized(self):
        """x + O(x²) is normalized; 2x is not."""
        assert TruncSeries.x(5).is_normalized()
        assert not TruncSeries([0, 2], 5).is_normalized()
        with pytest.raises(DomainError):
            TruncSeries([0, 2], 5).require_normalized()

    def test_order_mismatch_raises(self):
        """Binary operations need equal orders."""
        with pytest.raises(UsageError):
            TruncSeries.x(4) + TruncSeries.x(5)

    def test_truncate_cannot_raise_order(self):
        """Truncation only lowers the order."""
        with pytest.raises(UsageError):
            TruncSeries.x(3).truncate(5)

    def test_unsupported_coefficient(self):
        """Floats are rejected."""
        with pytest.raises(UsageError):
            TruncSeries([0.5])


class TestRing:
    """Test ring operations and division."""

    def test_geometric_inverse(self):
        """1/(1 − x) is the geometric series."""
        one = TruncSeries.one(N)
        assert div(one, one - TruncSeries.x(N)) == geometric_series(N)

    def test_division_by_zero_constant(self):
        """Division needs an invertible constant term."""
        with pytest.raises(SingularityError):
            div(TruncSeries.one(N), TruncSeries.x(N))

    def test_negative_power(self):
        """(1 − x)^{−2} has coefficients n + 1."""
        s = (TruncSeries.one(N) - TruncSeries.x(N)) ** -2
        assert list(s.coeffs) == [n + 1 for n in range(N + 1)]

    def test_scale_by_polynomial(self):
        """Scaling by α gives AlphaPoly coefficients."""
        s = TruncSeries.x(3).scale(AlphaPoly.variable())
        assert s[1] == AlphaPoly.variable()

    @pytest.mark.parametrize("order", [1, 7, 20])
    def test_cauchy_product_laws(self, order):
        """The product commutes, associates and distributes over addition."""
        rng = random.Random(order)
        for _ in range(10):
            a, b, c = (random_series(rng, order) for _ in range(3))
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c

    def test_integer_power_is_repeated_product(self):
        """pow_scalar(f, m) equals f·f·…·f for m = 0..5."""
        rng = random.Random(5)
        f = random_series(rng, N, constant=1)
        product = TruncSeries.one(N)
        for m in range(6):
            assert pow_scalar(f, m) == product
            product = product * f


class TestTranscendental:
    """Test exp, log and powers."""

    def test_exp_of_x(self):
        """exp(x) = Σ xⁿ/n!."""
        assert exp(TruncSeries.x(N)) == exp_series(N)

    def test_log_inverts_exp(self):
        """log(exp(f)) = f."""
        f = sin_series(N)
        assert log(exp(f)) == f

    def test_log1p(self):
        """log(1 + x) matches its series."""
        assert log(TruncSeries.one(N) + TruncSeries.x(N)) == log1p_series(N)

    def test_exp_needs_zero_constant(self):
        """exp(1 + x) is outside the formal domain."""
        with pytest.raises(DomainError):
            exp(TruncSeries.one(N))
        with pytest.raises(DomainError):
            log(TruncSeries.x(N))

    def test_square_root(self):
        """(1 + x)^{1/2} squared is 1 + x."""
        one_plus = TruncSeries.one(N) + TruncSeries.x(N)
        root = pow_scalar(one_plus, Fraction(1, 2))
        assert root * root == one_plus
        assert root[2] == Fraction(-1, 8)

    def test_symbolic_power(self):
        """(1 + x)^α has coefficients C(α, n)."""
        alpha = AlphaPoly.variable()
        s = pow_scalar(TruncSeries.one(6) + TruncSeries.x(6), alpha)
        for n in range(7):
            assert s[n] == gen_binomial(alpha, n)

    def test_pythagoras(self):
        """sin² + cos² = 1."""
        s, c = sin_series(N), cos_series(N)
        assert s * s + c * c == TruncSeries.one(N)

    def test_tanh_is_sinh_over_cosh(self):
        """tanh(2x)/2 coefficients start x − (4/3)x³."""
        t = tanh_series(N, 2)
        assert t[1] == 1
        assert t[3] == Fraction(-4, 3)
        assert sinh_series(N, 2)[3] == Fraction(4, 6)


class TestComposition:
    """Test composition and compositional inversion."""

    def test_compose_exp_log(self):
        """exp(log(1 + x)) − 1 = x."""
        e = expm1_series(N)
        assert compose(e, log1p_series(N)) == TruncSeries.x(N)

    def test_compose_needs_zero_inner_constant(self):
        """g(0) must vanish."""
        with pytest.raises(DomainError):
            compose(TruncSeries.x(N), TruncSeries.one(N))

    def test_inverse_of_expm1_is_log1p(self):
        """(e^x − 1)^{inv} = ln(1 + x)."""
        assert comp_inverse(expm1_series(N)) == log1p_series(N)

    def test_lagrange_and_newton_agree(self):
        """Both inversion routes give the same series."""
        f = sin_series(N) + TruncSeries.x(N) * TruncSeries.x(N)
        assert comp_inverse(f) == comp_inverse_newton(f)

    def test_inverse_needs_normalized(self):
        """Inversion is defined for x + O(x²)."""
        with pytest.raises(DomainError):
            comp_inverse(TruncSeries([0, 2], N))

    def test_inverse_both_sides(self):
        """f ∘ f^{inv} = f^{inv} ∘ f = x over one hundred seeded random series."""
        rng = random.Random(20240601)
        x = TruncSeries.x(N)
        for _ in range(100):
            f = random_normalized(rng, N)
            g = comp_inverse(f)
            assert compose(f, g) == x
            assert compose(g, f) == x

    def test_tree_function(self):
        """(x·e^{−x})^{inv} = Σ n^{n−1}xⁿ/n!."""
        g = comp_inverse(TruncSeries.x(N) * exp_series(N, -1))
        for n in range(1, N + 1):
            assert g[n] == Fraction(n ** (n - 1), factorial(n))

    def test_against_sympy(self):
        """Lagrange inversion matches sympy's series reversion of sin."""
        sympy = pytest.importorskip("sympy")
        x = sympy.symbols("x")
        expected = sympy.series(sympy.asin(x), x, 0, 10).removeO()
        g = comp_inverse(sin_series(9))
        for n in range(10):
            assert g[n] == Fraction(str(expected.coeff(x, n)))


class TestCalculus:
    """Test derivative, integral and rescaling."""

    def test_derivative_drops_order(self):
        """d/dx loses one order."""
        d = exp_series(N).derivative()
        assert d.order == N - 1
        assert d == exp_series(N - 1)

    def test_integrate_raises_order(self):
        """∫ cos = sin."""
        assert cos_series(N - 1).integrate() == sin_series(N)

    def test_rescale(self):
        """exp(x) rescaled by 2 is exp(2x)."""
        assert exp_series(N).rescale(2) == exp_series(N, 2)

    def test_expm1_at_zero(self):
        """(e^{ax} − 1)/a tends to x."""
        assert expm1_series(N, 0) == TruncSeries.x(N)


class TestCombinatorics:
    """Test Bernoulli numbers and composition sums."""

    def test_bernoulli_numbers(self):
        """B_1 = −1/2, B_2 = 1/6, B_4 = −1/30, odd ones vanish."""
        assert bernoulli_number(1) == Fraction(-1, 2)
        assert bernoulli_number(2) == Fraction(1, 6)
        assert bernoulli_number(4) == Fraction(-1, 30)
        assert bernoulli_number(5) == 0

    def test_bernoulli_poly(self):
        """B_2(x) = x² − x + 1/6."""
        assert bernoulli_poly(2, Fraction(1, 2)) == Fraction(-1, 12)
        assert bernoulli_poly(3, 0) == 0

    @pytest.mark.parametrize("q", range(13))
    def test_bernoulli_at_one_half(self, q):
        """B_q(1/2) = (2^{1−q} − 1)·B_q."""
        assert bernoulli_poly(q, Fraction(1, 2)) == (Fraction(2) ** (1 - q) - 1) * bernoulli_number(q)

    def test_composition_sum_counts(self):
        """Unit weights count compositions: C(t−1, m−1)."""
        assert composition_sum(lambda q: Fraction(1), 5, 2) == 4
        assert composition_sum(lambda q: Fraction(1), 6, 3) == 10

    def test_gen_binomial(self):
        """C(1/2, 2) = −1/8."""
        assert gen_binomial(Fraction(1, 2), 2) == Fraction(-1, 8)
