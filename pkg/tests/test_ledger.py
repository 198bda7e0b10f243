"""
Tests for the run ledger: hash chaining and locking.
"""

import tempfile
import threading
from pathlib import Path

import orjson
import pytest
from filelock import FileLock

from invseries import ledger
from invseries.errors import LedgerLockError
from invseries.ledger import append_run, verify_ledger


@pytest.fixture
def temp_ledger():
    """Path of a ledger file in a temporary directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir) / "runs" / "ledger.jsonl"


def make_report(passed=2, failed=0):
    checks = [{"name": f"c{i}", "pass": True, "detail": {}} for i in range(passed)]
    checks += [{"name": f"f{i}", "pass": False, "detail": {}} for i in range(failed)]
    return {
        "subcommand": "verify",
        "config": {"order": 12, "terms": 100, "prec": 64, "p": "1", "fmt": "json", "seed": 1},
        "results": [],
        "checks": checks,
    }


class TestAppend:
    """Test appending run records."""

    def test_first_record(self, temp_ledger):
        """The first record has seq 0 and an empty prev_hash."""
        record = append_run(temp_ledger, make_report())
        assert record["seq"] == 0
        assert record["prev_hash"] == ""
        assert record["passed"] == 2
        assert record["failed"] == 0
        assert len(record["record_hash"]) == 64

    def test_chain_links(self, temp_ledger):
        """Each record points at its predecessor."""
        first = append_run(temp_ledger, make_report())
        second = append_run(temp_ledger, make_report(failed=1))
        assert second["seq"] == 1
        assert second["prev_hash"] == first["record_hash"]
        assert second["failed"] == 1

    def test_same_report_same_digest(self, temp_ledger):
        """Digests depend only on the report."""
        first = append_run(temp_ledger, make_report())
        second = append_run(temp_ledger, make_report())
        assert first["digest"] == second["digest"]
        assert first["record_hash"] != second["record_hash"]

    def test_concurrent_appends_are_serialized(self, temp_ledger):
        """Appends from several threads keep one unbroken chain."""
        errors = []

        def worker():
            try:
                for _ in range(3):
                    append_run(temp_ledger, make_report())
            except Exception as e:  # pragma: no cover - reported below
                errors.append(e)

        threads = [threading.Thread(target=worker) for _ in range(3)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()

        assert not errors
        result = verify_ledger(temp_ledger)
        assert result["ok"]
        assert result["checked_records"] == 9

    def test_lock_timeout(self, temp_ledger, monkeypatch):
        """A held lock makes the append fail with LedgerLockError."""
        monkeypatch.setattr(ledger, "LOCK_TIMEOUT", 0.1)
        temp_ledger.parent.mkdir(parents=True, exist_ok=True)
        holder = FileLock(str(temp_ledger) + ".lock")
        holder.acquire()
        try:
            done = {}

            def worker():
                try:
                    append_run(temp_ledger, make_report())
                except LedgerLockError as e:
                    done["error"] = e

            t = threading.Thread(target=worker)
            t.start()
            t.join()
            assert "error" in done
        finally:
            holder.release()


class TestVerify:
    """Test hash chain verification."""

    def test_empty_ledger(self, temp_ledger):
        """A missing ledger verifies trivially."""
        result = verify_ledger(temp_ledger)
        assert result == {"ok": True, "checked_records": 0, "head_hash": "", "error": None}

    def test_valid_chain(self, temp_ledger):
        """Untouched ledgers verify."""
        for _ in range(3):
            last = append_run(temp_ledger, make_report())
        result = verify_ledger(temp_ledger)
        assert result["ok"]
        assert result["head_hash"] == last["record_hash"]

    def test_tampered_record(self, temp_ledger):
        """Editing a field breaks that record's hash."""
        for _ in range(3):
            append_run(temp_ledger, make_report())
        lines = temp_ledger.read_bytes().splitlines()
        record = orjson.loads(lines[1])
        record["passed"] = 99
        lines[1] = orjson.dumps(record, option=orjson.OPT_SORT_KEYS)
        temp_ledger.write_bytes(b"\n".join(lines) + b"\n")

        result = verify_ledger(temp_ledger)
        assert not result["ok"]
        assert result["checked_records"] == 1
        assert "record_hash" in result["error"]

    def test_removed_record(self, temp_ledger):
        """Dropping a middle record breaks the prev_hash link."""
        for _ in range(3):
            append_run(temp_ledger, make_report())
        lines = temp_ledger.read_bytes().splitlines()
        temp_ledger.write_bytes(lines[0] + b"\n" + lines[2] + b"\n")

        result = verify_ledger(temp_ledger)
        assert not result["ok"]
        assert "prev_hash mismatch" in result["error"]

    def test_garbage_line(self, temp_ledger):
        """Non-JSON lines are reported."""
        append_run(temp_ledger, make_report())
        with open(temp_ledger, "ab") as f:
            f.write(b"not json\n")
        result = verify_ledger(temp_ledger)
        assert not result["ok"]
        assert "not valid JSON" in result["error"]
