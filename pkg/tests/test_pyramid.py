"""
Tests for the number pyramid and its p-deformations.
"""

from fractions import Fraction

import pytest

from invseries.errors import ConsistencyError, UsageError
from invseries.pyramid import (
    MAX_ORACLE,
    build,
    build_p,
    derivative_oracle,
    differentiate_normal_form,
    faces_check,
    oracle_check,
    p_tables_check,
    render_slice,
    stirling1,
    stirling2,
)
from invseries.suites import APPENDIX_SLICES


class TestPlainPyramid:
    """Test the recurrence table."""

    @pytest.mark.parametrize("n", range(1, 7))
    def test_reference_slices(self, n):
        """Layers 1..6 match the tabulated values."""
        assert build(6).slice(n) == APPENDIX_SLICES[n]

    def test_faces(self):
        """Stirling faces, falling-factorial row and positivity."""
        for check in faces_check(build(9)):
            assert check.passed, check.name

    def test_stirling_numbers(self):
        assert stirling2(5, 2) == 15
        assert stirling1(5, 2) == 50
        assert stirling1(4, 4) == 1

    def test_slice_out_of_range(self):
        with pytest.raises(UsageError):
            build(3).slice(4)

    def test_needs_a_layer(self):
        with pytest.raises(UsageError):
            build(0)

    def test_render(self):
        text = render_slice(build(3), 3)
        assert text.splitlines() == ["n=3:", "  k=1: 1  2  2", "  k=2: 3  3", "  k=3: 1"]


class TestOracle:
    """Test the differentiation oracle."""

    def test_matches_recurrence(self):
        assert oracle_check(build(8)).passed

    def test_tampered_table(self):
        """A single wrong entry is a consistency error."""
        table = build(4)
        table.layers[4][(2, 3)] = 15
        with pytest.raises(ConsistencyError) as info:
            oracle_check(table)
        assert info.value.errors == ["n = 4"]

    def test_first_layer(self):
        """G_1 = α·e^x·x^{−1}."""
        assert differentiate_normal_form(1) == {1: {(1, 1): 1}}

    def test_oracle_limit(self):
        with pytest.raises(UsageError):
            differentiate_normal_form(MAX_ORACLE + 1)

    def test_unknown_variant(self):
        with pytest.raises(UsageError):
            derivative_oracle(3, "ti")


class TestDeformations:
    """Test the A(p) and B(p) tables."""

    def test_tables_match_oracle(self):
        for check in p_tables_check(5):
            assert check.passed, check.name

    def test_a_table_at_zero(self):
        """A(0) is the plain pyramid."""
        a_table, _ = build_p(5)
        assert a_table.evaluate(0).slice(5) == build(5).slice(5)

    def test_b_table_oracle_at_rational_p(self):
        """B(p) at p = 1/3 equals the tp-oracle entries."""
        _, b_table = build_p(4)
        oracle = derivative_oracle(4, "tp", Fraction(1, 3))
        evaluated = b_table.evaluate(Fraction(1, 3))
        for n in range(1, 5):
            nonzero = {key: v for key, v in evaluated.layers[n].items() if v != 0}
            assert nonzero == oracle.layers[n]

    def test_entries_are_polynomials(self):
        """Second-layer entries are linear in p at most."""
        a_table, _ = build_p(2)
        assert all(v.degree <= 1 for v in a_table.layers[2].values())
