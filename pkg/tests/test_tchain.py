"""
Tests for the 𝔗 operator, its inverse and chains.
"""

import random
from fractions import Fraction

import pytest

from invseries.errors import DomainError, UsageError
from invseries.series import TruncSeries, div, expm1_series, sin_series, sinh_series, tanh_series
from invseries.tchain import (
    MAX_CHAIN,
    chain,
    deformed_chain_check,
    find_period,
    first_deviation,
    identities_310,
    inverse_roundtrip_check,
    parity_check,
    random_normalized,
    rescaling_check,
    seed_series,
    sinh_chain_check,
    t_apply,
    t_inverse,
    t_power,
    theta_propagation,
)


N = 10


class TestOperator:
    """Test 𝔗 and 𝔗⁻¹ on closed forms."""

    def test_identity_is_fixed(self):
        """𝔗x = x."""
        x = TruncSeries.x(N)
        assert t_apply(x) == x
        assert t_inverse(x) == x

    @pytest.mark.parametrize("a", [1, 3, Fraction(1, 2), -2])
    def test_exponential_flips_sign(self, a):
        """𝔗((e^{ax} − 1)/a) = (e^{−ax} − 1)/(−a)."""
        assert t_apply(expm1_series(N, a)) == expm1_series(N, -a)

    def test_order_is_kept(self):
        """No truncation order is lost to the derivative."""
        assert t_apply(sin_series(N)).order == N
        assert t_inverse(sin_series(N)).order == N

    def test_sinh_to_tanh(self):
        """𝔗(sinh x) = tanh x."""
        assert t_apply(sinh_series(N)) == tanh_series(N)

    def test_requires_normalized(self):
        """Non-normalized input is a domain error."""
        with pytest.raises(DomainError):
            t_apply(TruncSeries([0, 2, 1], N))

    @pytest.mark.parametrize("seed", [3, 11])
    def test_roundtrip_on_random_series(self, seed):
        """𝔗 and 𝔗⁻¹ invert each other."""
        f = random_normalized(random.Random(seed), N)
        assert inverse_roundtrip_check(f).passed

    def test_roundtrip_many_at_order_20(self):
        """One hundred seeded random series survive 𝔗 ∘ 𝔗⁻¹ and 𝔗⁻¹ ∘ 𝔗 at order 20."""
        rng = random.Random(20240601)
        failed = [i for i in range(100) if not inverse_roundtrip_check(random_normalized(rng, 20)).passed]
        assert failed == []

    def test_rescaling(self):
        """𝔗 commutes with f ↦ f(Ax)/A."""
        f = random_normalized(random.Random(5), N)
        assert rescaling_check(f, Fraction(2, 3)).passed

    def test_negative_power_is_inverse(self):
        """𝔗^{−2} undoes 𝔗²."""
        f = sin_series(N)
        assert t_power(t_power(f, 2), -2) == f


class TestChains:
    """Test chains and period detection."""

    def test_chain_powers(self):
        """Links are labelled by their power of 𝔗."""
        state = chain(sin_series(N), -2)
        assert state.powers == [0, -1, -2]
        assert state.seed == sin_series(N)
        assert state.links[1] == t_inverse(sin_series(N))

    def test_chain_limit(self):
        """Chains longer than the limit are refused."""
        with pytest.raises(UsageError):
            chain(sin_series(N), MAX_CHAIN + 1)

    def test_exponential_has_period_two(self):
        """(e^{px} − 1)/p returns after two steps."""
        assert find_period(expm1_series(N, 3)) == 2

    def test_identity_has_period_one(self):
        assert find_period(TruncSeries.x(N)) == 1

    def test_random_series_are_aperiodic(self):
        """Random seeds do not return within eight steps."""
        rng = random.Random(20240601)
        for _ in range(5):
            assert find_period(random_normalized(rng, 6)) is None

    def test_period_limit(self):
        with pytest.raises(UsageError):
            find_period(TruncSeries.x(N), max_k=MAX_CHAIN + 1)


class TestIdentities:
    """Test the structural identities of 𝔗."""

    @pytest.mark.parametrize("name", ["sin", "x-x2", "exp"])
    def test_deformation_identities(self, name):
        """The three e^{−x}-deformation identities hold exactly."""
        for check in identities_310(seed_series(name, 8)):
            assert check.passed, check.name

    def test_first_deviation(self):
        assert first_deviation(sin_series(N)) == 3
        assert first_deviation(TruncSeries.x(N)) is None

    @pytest.mark.parametrize("k", [-2, -1, 1, 2, 3])
    def test_parity(self, k):
        """The first deviating coefficient scales by (1 − n)^k, also for 𝔗⁻¹."""
        f = TruncSeries([0, 1, 0, 0, Fraction(2, 7)], N)
        check = parity_check(f, k)
        assert check.passed
        assert check.detail["coefficient"] == Fraction(-3) ** k * Fraction(2, 7)

    def test_parity_of_sin_under_inverse(self):
        """sin x deviates at x³ with −1/6, so 𝔗⁻² gives −1/24 there."""
        check = parity_check(sin_series(6), -2)
        assert check.passed
        assert check.detail["coefficient"] == Fraction(-1, 24)

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("theta", [0, Fraction(1, 2), 3])
    @pytest.mark.parametrize("k", [1, 2])
    def test_theta_propagation(self, n, theta, k):
        """The x^{n+1} coefficient of 𝔗^{2k} f follows 1 − n^{2k}(1 − θ)."""
        assert theta_propagation(n, theta, k).passed

    def test_theta_small_case(self):
        """x + x²/2 gives −1/2 at x³ after two steps."""
        check = theta_propagation(2, 0, 1)
        assert check.detail["coefficient"] == Fraction(-1, 2)

    def test_theta_example(self):
        """n = 3, θ = 2, four steps: (1 + 3⁴)/4! = 82/24."""
        check = theta_propagation(3, 2, 2)
        assert check.passed
        assert check.detail["coefficient"] == Fraction(82, 24)

    def test_theta_at_higher_order(self):
        """A longer truncation leaves the propagated coefficient alone."""
        check = theta_propagation(3, 2, 2, order=7)
        assert check.passed
        assert check.detail["coefficient"] == Fraction(82, 24)

    def test_theta_order_too_small(self):
        with pytest.raises(UsageError):
            theta_propagation(3, 2, 2, order=3)

    def test_theta_needs_n_above_one(self):
        with pytest.raises(UsageError):
            theta_propagation(1, 0, 1)

    def test_deformed_chain(self):
        """x·e^{−x} → x/(1−x) → x − x² → (x − x²)/(1 − 2x) and the inverses."""
        for check in deformed_chain_check(12):
            assert check.passed, check.name

    def test_deformed_chain_first_step(self):
        x = TruncSeries.x(N)
        one = TruncSeries.one(N)
        assert t_apply(div(x, one - x)) == x - x * x

    @pytest.mark.parametrize("p", [1, 2, Fraction(1, 3)])
    def test_sinh_chain(self, p):
        """sinh ← 2·tanh(·/2), sinh → tanh → sinh(2·)/2 at any scale."""
        for check in sinh_chain_check(p, 11):
            assert check.passed, check.name


class TestSeeds:
    """Test named seeds."""

    def test_known_seeds_are_normalized(self):
        for name in ("x", "exp", "xexp", "x-x2", "x+x3", "sin", "sinh"):
            assert seed_series(name, 6, 2).is_normalized()

    def test_unknown_seed(self):
        with pytest.raises(UsageError) as info:
            seed_series("cosh", 6)
        assert "known:" in info.value.errors[0]

    def test_random_is_reproducible(self):
        """The same seed gives the same series."""
        assert random_normalized(random.Random(1), 8) == random_normalized(random.Random(1), 8)
