"""
Exception hierarchy for invseries.

Every error carries a human-readable ``message`` and an optional list of
detail strings, so the CLI can print them the same way for every module.
"""

from __future__ import annotations

from typing import Any


class InvSeriesError(Exception):
    """Base class for all invseries errors."""

    exit_code = 1

    def __init__(self, message: str, errors: list[str] | None = None):
        super().__init__(message)
        self.message = message
        self.errors = errors or []


class UsageError(InvSeriesError):
    """Bad arguments: order mismatch, unsupported parameter, bad flag."""

    exit_code = 2


class DomainError(UsageError):
    """Input outside the domain of an operation (e.g. non-normalized series)."""


class SingularityError(DomainError):
    """Division by a non-invertible constant term, or a pole."""


class BranchError(DomainError):
    """Argument outside the principal branch of a multivalued function."""


class ConsistencyError(InvSeriesError):
    """Two independent routes for the same quantity disagree."""


class AccuracyError(InvSeriesError):
    """A numeric procedure did not reach the requested tolerance."""

    def __init__(self, message: str, partial: Any = None, errors: list[str] | None = None):
        super().__init__(message, errors)
        self.partial = partial


class ReportSchemaError(InvSeriesError):
    """A JSON report failed schema validation."""


class LedgerLockError(InvSeriesError):
    """Raised when the run ledger lock cannot be acquired."""
