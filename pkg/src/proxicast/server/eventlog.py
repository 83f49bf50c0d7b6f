"""Append-only JSONL mutation log, consumed by the analytics pipeline."""

from __future__ import annotations

import json
import threading
from pathlib import Path


def log_entry(t: float, room: str, entry_type: str, payload: dict) -> dict:
    """The one place that defines the event-log record schema."""
    return {"t": t, "room": room, "type": entry_type, "payload": payload}


class MemoryEventLog:
    """Collects entries in memory; used by tests and fixture generators."""

    def __init__(self):
        self.entries: list[dict] = []

    def append(self, entry: dict) -> None:
        self.entries.append(entry)

    def as_jsonl(self) -> str:
        return "".join(json.dumps(e) + "\n" for e in self.entries)


class JsonlEventLog:
    """Appends one JSON object per line to a file, flushed per entry."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._fh = None

    def append(self, entry: dict) -> None:
        line = json.dumps(entry) + "\n"
        with self._lock:
            if self._fh is None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self._fh = self.path.open("a", encoding="utf-8")
            self._fh.write(line)
            self._fh.flush()

    def close(self) -> None:
        with self._lock:
            if self._fh is not None:
                self._fh.close()
                self._fh = None
