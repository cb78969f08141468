"""Append-only annotation store: JSONL with a per-line checksum.

Each line is `{"record": {...}, "crc": <crc32 of the canonical record
JSON>}`. On load, an invalid final line is treated as a torn write and
dropped; an invalid earlier line means real corruption and is an error.
"""

from __future__ import annotations

import json
import threading
import zlib
from datetime import datetime, timedelta, timezone
from pathlib import Path


class StoreCorruptError(RuntimeError):
    """A non-final store line failed parsing or its checksum."""


def _canonical(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def _crc(record: dict) -> int:
    return zlib.crc32(_canonical(record).encode("utf-8"))


class AnnotationStore:
    """Single-writer append log of reviewer decisions."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._records: list[dict] = []
        self._last_ts: dict[tuple[str, str, str], str] = {}
        self.recovered_torn_line = False
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        lines = self.path.read_text(encoding="utf-8").splitlines()
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            record = self._parse_line(line)
            if record is None:
                if i == len(lines) - 1:
                    self.recovered_torn_line = True
                    break
                raise StoreCorruptError(
                    f"{self.path}: line {i + 1} is corrupt (not the final line); "
                    "refusing to continue on a damaged append stream"
                )
            self._remember(record)

    @staticmethod
    def _parse_line(line: str) -> dict | None:
        try:
            wrapper = json.loads(line)
            record = wrapper["record"]
            if _crc(record) != int(wrapper["crc"]):
                return None
            return record
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            return None

    def _remember(self, record: dict) -> None:
        self._records.append(record)
        key = (record["artifact_id"], record["taxonomy_name"], record["reviewer"])
        self._last_ts[key] = record["timestamp"]

    def _next_timestamp(self, key: tuple[str, str, str]) -> str:
        now = datetime.now(timezone.utc)
        stamp = now.isoformat()
        last = self._last_ts.get(key)
        if last is not None and stamp <= last:
            stamp = (datetime.fromisoformat(last) + timedelta(microseconds=1)).isoformat()
        return stamp

    def append(
        self,
        artifact_id: str,
        taxonomy_name: str,
        accepted: list[str],
        rejected: list[str],
        reviewer: str,
    ) -> dict:
        """Persist one decision; the store assigns a monotone timestamp."""
        with self._lock:
            key = (artifact_id, taxonomy_name, reviewer)
            record = {
                "artifact_id": artifact_id,
                "taxonomy_name": taxonomy_name,
                "accepted": sorted(accepted),
                "rejected": sorted(rejected),
                "reviewer": reviewer,
                "timestamp": self._next_timestamp(key),
            }
            line = json.dumps({"record": record, "crc": _crc(record)}, ensure_ascii=False)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
            self._remember(record)
            return record

    def records(self, artifact_id: str | None = None) -> list[dict]:
        """Full history, newest first."""
        with self._lock:
            selected = [
                r for r in self._records if artifact_id is None or r["artifact_id"] == artifact_id
            ]
        return list(reversed(selected))

    def effective(self) -> dict[tuple[str, str, str], dict]:
        """Latest record per (artifact, taxonomy, reviewer)."""
        with self._lock:
            latest: dict[tuple[str, str, str], dict] = {}
            for record in self._records:
                key = (record["artifact_id"], record["taxonomy_name"], record["reviewer"])
                latest[key] = record
        return latest

    def reviewed_artifacts(self, taxonomy_name: str) -> set[str]:
        return {
            artifact_id
            for (artifact_id, tax, _reviewer) in self.effective()
            if tax == taxonomy_name
        }

    def accepted_labels(self, taxonomy_name: str) -> dict[str, set[str]]:
        """Effective accepted labels per artifact (union across reviewers)."""
        merged: dict[str, set[str]] = {}
        for (artifact_id, tax, _reviewer), record in self.effective().items():
            if tax != taxonomy_name:
                continue
            merged.setdefault(artifact_id, set()).update(record["accepted"])
        return merged
