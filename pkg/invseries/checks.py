"""
Check records returned by the verification operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence


@dataclass
class Check:
    """Outcome of one identity or numeric comparison."""

    name: str
    passed: bool
    failures: list[Any] = field(default_factory=list)
    detail: dict[str, Any] = field(default_factory=dict)
    exploratory: bool = False

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict[str, Any]:
        detail = dict(self.detail)
        if self.failures:
            detail["failures"] = self.failures
        if self.exploratory:
            detail["exploratory"] = True
        return {"name": self.name, "pass": self.passed, "detail": detail}


def compare_sequences(
    name: str,
    left: Sequence[Any],
    right: Sequence[Any],
    start: int = 0,
    eq: Callable[[Any, Any], bool] | None = None,
    **detail: Any,
) -> Check:
    """Compare two coefficient sequences index by index."""
    eq = eq or (lambda a, b: a == b)
    failures = [start + i for i, (a, b) in enumerate(zip(left, right)) if not eq(a, b)]
    if len(left) != len(right):
        failures.append(f"length {len(left)} != {len(right)}")
    return Check(name, not failures, failures, detail)


def compare_series(name: str, left, right, **detail: Any) -> Check:
    """Compare two truncated series coefficientwise."""
    if left.order != right.order:
        return Check(name, False, [f"order {left.order} != {right.order}"], detail)
    return compare_sequences(name, left.coeffs, right.coeffs, **detail)


def within(name: str, value, target, tol, **detail: Any) -> Check:
    """Numeric comparison |value - target| <= tol."""
    diff = abs(value - target)
    info = {"value": value, "target": target, "diff": diff, "tol": tol}
    info.update(detail)
    return Check(name, bool(diff <= tol), [] if diff <= tol else ["tolerance exceeded"], info)


def all_passed(checks: Sequence[Check]) -> bool:
    return all(c.passed or c.exploratory for c in checks)
