"""
Deterministic JSON encoding and hashing for invseries reports.

Exact values are rendered as strings ("p/q" rationals, ascending
coefficient lists), so the same run configuration always produces the
same bytes and therefore the same digest.
"""

from __future__ import annotations

import dataclasses
import hashlib
from fractions import Fraction
from typing import Any

import mpmath
import orjson

from invseries.numerics import digits_for


def encode_scalar(value: Any, prec: int | None = None) -> Any:
    """
    Render an exact or big-float scalar as a JSON-safe value.

    Big floats carry the digits of ``prec`` bits, or of the current mpmath
    precision when ``prec`` is None.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, mpmath.mpf):
        digits = digits_for(mpmath.mp.prec if prec is None else prec)
        return mpmath.nstr(value, digits, strip_zeros=False)
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


def to_jsonable(obj: Any, prec: int | None = None) -> Any:
    """Recursively convert results into plain JSON structures."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict(), prec)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj), prec)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, prec) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, prec) for v in obj]
    if isinstance(obj, (Fraction, mpmath.mpf)):
        return encode_scalar(obj, prec)
    if isinstance(obj, int) and not isinstance(obj, bool) and abs(obj) >= 2**63:
        # beyond what orjson encodes natively
        return str(obj)
    if hasattr(obj, "coeffs") and hasattr(obj, "var"):
        return {"var": obj.var, "coeffs": [encode_scalar(c) for c in obj.coeffs]}
    return obj


def canonicalize(obj: Any) -> bytes:
    """
    Convert a report to canonical JSON bytes.

    - UTF-8 encoding
    - Keys sorted at every object level
    - No insignificant whitespace
    """
    return orjson.dumps(to_jsonable(obj), option=orjson.OPT_SORT_KEYS)


def report_digest(report: dict[str, Any]) -> str:
    """SHA-256 of the canonical report bytes."""
    return hashlib.sha256(canonicalize(report)).hexdigest()


def compute_record_hash(record_without_hash: dict[str, Any], prev_hash: str) -> str:
    """
    Hash a ledger record chained to its predecessor.

    The hash covers the canonical JSON of the record (``record_hash``
    omitted, ``prev_hash`` included) followed by the previous hash.
    """
    if "record_hash" in record_without_hash:
        record_without_hash = {k: v for k, v in record_without_hash.items() if k != "record_hash"}
    record_without_hash["prev_hash"] = prev_hash

    hasher = hashlib.sha256()
    hasher.update(canonicalize(record_without_hash))
    hasher.update(prev_hash.encode("utf-8"))
    return hasher.hexdigest()


def verify_record_hash(record: dict[str, Any], expected_prev_hash: str) -> bool:
    if "record_hash" not in record:
        return False
    stored = record["record_hash"]
    body = {k: v for k, v in record.items() if k != "record_hash"}
    return stored == compute_record_hash(body, expected_prev_hash)
