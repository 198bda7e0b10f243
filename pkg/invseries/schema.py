"""
JSON Schema validation for invseries run reports.

Every JSON report is validated against the run report v1 schema before it
is printed or recorded.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import jsonschema
from jsonschema import Draft7Validator

from invseries.errors import ReportSchemaError

_SCHEMA_PATH = Path(__file__).parent / "schemas" / "run_report_v1.json"
_SCHEMA: dict[str, Any] | None = None


def _load_schema() -> dict[str, Any]:
    """Load the JSON schema from disk (cached)."""
    global _SCHEMA
    if _SCHEMA is None:
        with open(_SCHEMA_PATH, "r", encoding="utf-8") as f:
            _SCHEMA = json.load(f)
    return _SCHEMA


def validate_report(report: dict[str, Any]) -> None:
    """
    Validate a JSON-ready report envelope.

    Raises:
        ReportSchemaError: with one ``path: message`` entry per violation
    """
    validator = Draft7Validator(_load_schema())
    errors = list(validator.iter_errors(report))
    if errors:
        raise ReportSchemaError(
            f"Report validation failed with {len(errors)} error(s)",
            [_format_error(e) for e in errors],
        )

    # A summary entry, when present, must agree with the check list.
    checks = report["checks"]
    counted = {"total": len(checks), "passed": sum(1 for c in checks if c["pass"])}
    for i, item in enumerate(report["results"]):
        summary = item.get("summary") if isinstance(item, dict) else None
        if not isinstance(summary, dict):
            continue
        mismatched = [
            f"results.{i}.summary.{key}: {summary.get(key)} != {value}"
            for key, value in counted.items()
            if summary.get(key) != value
        ]
        if mismatched:
            raise ReportSchemaError("Report summary disagrees with its checks", mismatched)


def _format_error(error: jsonschema.ValidationError) -> str:
    """Format a validation error for display."""
    path = ".".join(str(p) for p in error.absolute_path) if error.absolute_path else "root"
    return f"{path}: {error.message}"
