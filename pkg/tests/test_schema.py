"""
Tests for run report schema validation and configuration.
"""

from fractions import Fraction

import pytest

from invseries.config import DEFAULT_ORDER, RunConfig, parse_rational, resolve
from invseries.errors import ReportSchemaError, UsageError
from invseries.schema import validate_report


def make_valid_report(**overrides):
    """Create a valid report with optional overrides."""
    report = {
        "subcommand": "pyramid",
        "config": {
            "subcommand": "pyramid",
            "order": 12,
            "terms": 10000,
            "prec": 256,
            "p": "1/2",
            "fmt": "json",
            "seed": 20240601,
        },
        "results": [{"n": 4}, {"summary": {"total": 1, "passed": 1}}],
        "checks": [{"name": "pyramid.face_stirling2", "pass": True, "detail": {"n_max": 4}}],
    }
    report.update(overrides)
    return report


class TestValidReport:
    """Test valid report scenarios."""

    def test_valid_report(self):
        """A complete envelope passes."""
        validate_report(make_valid_report())

    def test_results_without_summary(self):
        """A summary entry is optional."""
        validate_report(make_valid_report(results=[]))

    def test_negative_rational_p(self):
        """Signed rationals are valid parameters."""
        report = make_valid_report()
        report["config"]["p"] = "-3"
        validate_report(report)


class TestInvalidReport:
    """Test schema violations."""

    def test_unknown_subcommand(self):
        """Subcommands are an enum."""
        with pytest.raises(ReportSchemaError) as info:
            validate_report(make_valid_report(subcommand="plot"))
        assert any(e.startswith("subcommand:") for e in info.value.errors)

    def test_missing_checks(self):
        """checks is required."""
        report = make_valid_report()
        del report["checks"]
        with pytest.raises(ReportSchemaError):
            validate_report(report)

    def test_results_must_be_a_list(self):
        """results is an array."""
        with pytest.raises(ReportSchemaError):
            validate_report(make_valid_report(results={"n": 4}))

    def test_check_needs_boolean_pass(self):
        """pass is a boolean."""
        bad = [{"name": "x", "pass": "yes", "detail": {}}]
        with pytest.raises(ReportSchemaError) as info:
            validate_report(make_valid_report(checks=bad, results=[]))
        assert any("checks.0.pass" in e for e in info.value.errors)

    def test_extra_top_level_key(self):
        """No additional properties at the top level."""
        with pytest.raises(ReportSchemaError):
            validate_report(make_valid_report(extra=1))

    def test_precision_bounds(self):
        """prec is limited to [16, 4096]."""
        report = make_valid_report()
        report["config"]["prec"] = 8
        with pytest.raises(ReportSchemaError):
            validate_report(report)

    def test_float_p_rejected(self):
        """p must be a rational string."""
        report = make_valid_report()
        report["config"]["p"] = "0.5"
        with pytest.raises(ReportSchemaError):
            validate_report(report)

    def test_summary_must_match_checks(self):
        """A summary that disagrees with the checks is rejected."""
        report = make_valid_report(results=[{"summary": {"total": 2, "passed": 2}}])
        with pytest.raises(ReportSchemaError) as info:
            validate_report(report)
        assert "results.0.summary.total: 2 != 1" in info.value.errors


class TestConfig:
    """Test RunConfig resolution."""

    def test_defaults(self, monkeypatch):
        """Unset flags keep the defaults."""
        for name in ("ORDER", "TERMS", "PREC", "SEED", "FORMAT"):
            monkeypatch.delenv(f"INVSERIES_{name}", raising=False)
        config = resolve("family")
        assert config.order == DEFAULT_ORDER
        assert config.p == 1
        assert config.fmt == "plain"

    def test_environment_then_flags(self, monkeypatch):
        """Environment overrides defaults, flags override the environment."""
        monkeypatch.setenv("INVSERIES_ORDER", "20")
        monkeypatch.setenv("INVSERIES_PREC", "128")
        config = resolve("series", order=8)
        assert config.order == 8
        assert config.prec == 128

    def test_bad_environment_value(self, monkeypatch):
        """Non-integer environment values are usage errors."""
        monkeypatch.setenv("INVSERIES_ORDER", "many")
        with pytest.raises(UsageError):
            resolve("series")

    def test_rational_parsing(self):
        """p accepts p/q and integers."""
        assert parse_rational("1/2") == Fraction(1, 2)
        assert parse_rational("-3") == -3
        with pytest.raises(UsageError):
            parse_rational("half")

    def test_limits(self):
        """Order above 64 and unknown formats are rejected together."""
        with pytest.raises(UsageError) as info:
            RunConfig(order=65, fmt="xml").validate()
        assert len(info.value.errors) == 2

    def test_to_dict_keeps_fraction(self):
        """p stays a Fraction until rendering."""
        assert RunConfig(p=Fraction(1, 3)).to_dict()["p"] == Fraction(1, 3)
