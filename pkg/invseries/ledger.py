"""
Append-only run ledger.

Each ``verify --record`` run appends one JSON line whose ``record_hash``
chains to the previous line, so a ledger can later be checked for
tampering or truncation in the middle.
"""

from __future__ import annotations

import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import orjson
from filelock import FileLock, Timeout

from invseries.canonical import canonicalize, compute_record_hash, report_digest, verify_record_hash
from invseries.errors import LedgerLockError

logger = logging.getLogger("invseries")

LEDGER_VERSION = "1"
LOCK_TIMEOUT = 10


def _read_records(path: Path) -> list[bytes]:
    if not path.exists():
        return []
    with open(path, "rb") as f:
        return [line for line in f.read().splitlines() if line.strip()]


def _head_hash(lines: list[bytes]) -> str:
    if not lines:
        return ""
    return orjson.loads(lines[-1]).get("record_hash", "")


def append_run(path: str | Path, report: dict[str, Any]) -> dict[str, Any]:
    """
    Append a record of a JSON-ready report to the ledger.

    Returns the written record.

    Raises:
        LedgerLockError: if the ledger lock cannot be acquired in time
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lock = FileLock(str(path) + ".lock", timeout=LOCK_TIMEOUT)
    try:
        lock.acquire()
    except Timeout:
        raise LedgerLockError(f"Failed to acquire ledger lock for {path}")

    try:
        lines = _read_records(path)
        prev_hash = _head_hash(lines)
        checks = report.get("checks", [])
        record = {
            "ledger_version": LEDGER_VERSION,
            "seq": len(lines),
            "recorded_at": datetime.now(timezone.utc).isoformat(),
            "subcommand": report.get("subcommand", ""),
            "config": report.get("config", {}),
            "digest": report_digest(report),
            "passed": sum(1 for c in checks if c.get("pass")),
            "failed": sum(1 for c in checks if not c.get("pass")),
        }
        record["record_hash"] = compute_record_hash(dict(record), prev_hash)
        record["prev_hash"] = prev_hash
        with open(path, "ab") as f:
            f.write(canonicalize(record) + b"\n")
        logger.info(f"ledger: appended record {record['seq']} to {path}")
        return record
    finally:
        lock.release()


def verify_ledger(path: str | Path) -> dict[str, Any]:
    """
    Walk the hash chain of a ledger.

    Returns:
        Dict with ok, checked_records, head_hash, and error fields
    """
    lines = _read_records(Path(path))
    prev_hash = ""
    for i, line in enumerate(lines):
        try:
            record = orjson.loads(line)
        except orjson.JSONDecodeError:
            return {"ok": False, "checked_records": i, "head_hash": prev_hash, "error": f"Record {i}: not valid JSON"}

        actual_prev = record.get("prev_hash", "")
        if actual_prev != prev_hash:
            return {
                "ok": False,
                "checked_records": i,
                "head_hash": prev_hash,
                "error": f"Record {i}: prev_hash mismatch (expected {prev_hash[:16]}..., got {actual_prev[:16]}...)",
            }
        if not verify_record_hash(record, prev_hash):
            return {
                "ok": False,
                "checked_records": i,
                "head_hash": prev_hash,
                "error": f"Record {i}: record_hash verification failed",
            }
        prev_hash = record["record_hash"]

    return {"ok": True, "checked_records": len(lines), "head_hash": prev_hash, "error": None}
