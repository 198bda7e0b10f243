"""
Run configuration.

Defaults can be overridden from the environment (a ``.env`` file is read
when python-dotenv is installed); command-line flags override both.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace
from fractions import Fraction
from typing import Any

from invseries.errors import UsageError

# Load environment variables from .env file
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # python-dotenv is optional

DEFAULT_ORDER = 12
DEFAULT_TERMS = 10_000
DEFAULT_PREC = 256
DEFAULT_SEED = 20240601
MAX_ORDER = 64
MAX_PREC = 4096
FORMATS = ("plain", "json", "csv")

ENV_PREFIX = "INVSERIES_"


@dataclass(frozen=True)
class RunConfig:
    subcommand: str = ""
    order: int = DEFAULT_ORDER
    terms: int = DEFAULT_TERMS
    prec: int = DEFAULT_PREC
    p: Fraction = Fraction(1)
    fmt: str = "plain"
    seed: int = DEFAULT_SEED

    def validate(self) -> "RunConfig":
        errors = []
        if not 1 <= self.order <= MAX_ORDER:
            errors.append(f"order {self.order} outside [1, {MAX_ORDER}]")
        if not 16 <= self.prec <= MAX_PREC:
            errors.append(f"prec {self.prec} outside [16, {MAX_PREC}]")
        if self.terms < 1:
            errors.append(f"terms {self.terms} must be positive")
        if self.fmt not in FORMATS:
            errors.append(f"format {self.fmt!r} not one of {', '.join(FORMATS)}")
        if errors:
            raise UsageError("invalid run configuration", errors)
        return self

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["p"] = self.p
        return out


def parse_rational(text: str | int | Fraction) -> Fraction:
    """'1/2', '-3', '0.25' → Fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(f"not a rational number: {text!r}") from e


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError as e:
        raise UsageError(f"{ENV_PREFIX}{name} must be an integer, got {raw!r}") from e


def from_env() -> RunConfig:
    """Defaults with INVSERIES_ORDER/TERMS/PREC/SEED/FORMAT applied."""
    return RunConfig(
        order=_env_int("ORDER", DEFAULT_ORDER),
        terms=_env_int("TERMS", DEFAULT_TERMS),
        prec=_env_int("PREC", DEFAULT_PREC),
        seed=_env_int("SEED", DEFAULT_SEED),
        fmt=os.environ.get(ENV_PREFIX + "FORMAT") or "plain",
    )


def resolve(subcommand: str, **flags: Any) -> RunConfig:
    """Environment defaults overridden by the flags that were given (None means unset)."""
    base = from_env()
    given = {k: v for k, v in flags.items() if v is not None}
    if "p" in given:
        given["p"] = parse_rational(given["p"])
    return replace(base, subcommand=subcommand, **given).validate()
