"""Append-only record store and checkpoint files.

Formats (one record per line, single spaces, decimal fields):

    WINDOW n length p_max source D index
    CURSOR m t position completed

``source`` is one of lehmer, bauer_bennett, brute_force; D and index are 0
when not applicable.  Recovery re-reads files and ignores an invalid tail
(a torn last line); opening for append truncates that tail so the file
stays clean.  Every record is re-verified against the window product on
insertion, so the store never holds a false line whatever the driver did.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

from ..arith import window_largest_prime

SOURCES = ("lehmer", "bauer_bennett", "brute_force")


class IntegrityError(ValueError):
    """A record failed re-verification or evidence sets contradict."""


@dataclass(frozen=True, order=True)
class SmoothWindowRecord:
    n: int
    length: int
    p_max: int
    source: str
    coefficient: int = 0
    index: int = 0

    def to_line(self) -> str:
        return (
            f"WINDOW {self.n} {self.length} {self.p_max} "
            f"{self.source} {self.coefficient} {self.index}"
        )

    def verify(self) -> None:
        actual = window_largest_prime(self.n, self.length)
        if actual != self.p_max:
            raise IntegrityError(
                f"record claims P = {self.p_max} for window ({self.n}, {self.length}), "
                f"actual {actual}"
            )

    def key(self) -> tuple[int, int]:
        return (self.n, self.length)


def parse_record_line(line: str) -> SmoothWindowRecord | None:
    parts = line.strip().split(" ")
    if len(parts) != 7 or parts[0] != "WINDOW":
        return None
    try:
        n, length, p_max = int(parts[1]), int(parts[2]), int(parts[3])
        coefficient, index = int(parts[5]), int(parts[6])
    except ValueError:
        return None
    if parts[4] not in SOURCES or n < 1 or length < 1:
        return None
    return SmoothWindowRecord(n, length, p_max, parts[4], coefficient, index)


@dataclass(frozen=True)
class Checkpoint:
    m: int
    t: int
    position: int
    completed: int

    def to_line(self) -> str:
        return f"CURSOR {self.m} {self.t} {self.position} {self.completed}"


def parse_checkpoint_line(line: str) -> Checkpoint | None:
    parts = line.strip().split(" ")
    if len(parts) != 5 or parts[0] != "CURSOR":
        return None
    try:
        m, t, pos, done = (int(v) for v in parts[1:])
    except ValueError:
        return None
    if pos < 0 or done < 0:
        return None
    return Checkpoint(m, t, pos, done)


def _read_valid_prefix(path: str, parse) -> tuple[list, int]:
    """All leading valid entries and the byte length of that prefix."""
    entries = []
    offset = 0
    if not os.path.exists(path):
        return entries, offset
    with open(path, "rb") as fh:
        for raw in fh:
            if not raw.endswith(b"\n"):
                break  # torn tail
            try:
                text = raw.decode("ascii")
            except UnicodeDecodeError:
                break
            entry = parse(text)
            if entry is None:
                break
            entries.append(entry)
            offset += len(raw)
    return entries, offset


class RecordStore:
    """Append-only window records with (n, length) deduplication."""

    def __init__(self, path: str):
        self.path = path
        records, offset = _read_valid_prefix(path, parse_record_line)
        self._by_key: dict[tuple[int, int], SmoothWindowRecord] = {}
        for rec in records:
            self._by_key.setdefault(rec.key(), rec)
        self._truncate_to(offset)
        self._fh = open(path, "a", encoding="ascii")

    def _truncate_to(self, offset: int) -> None:
        if os.path.exists(self.path) and os.path.getsize(self.path) > offset:
            with open(self.path, "r+b") as fh:
                fh.truncate(offset)

    def insert(self, record: SmoothWindowRecord) -> bool:
        """Verify and add; returns False for a duplicate (n, length)."""
        if record.key() in self._by_key:
            return False
        record.verify()
        self._by_key[record.key()] = record
        self._fh.write(record.to_line() + "\n")
        return True

    def insert_all(self, records: Iterable[SmoothWindowRecord]) -> int:
        return sum(1 for r in records if self.insert(r))

    def flush(self) -> None:
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        self._fh.flush()
        self._fh.close()

    def records(self) -> list[SmoothWindowRecord]:
        return sorted(self._by_key.values())

    def __len__(self) -> int:
        return len(self._by_key)

    def __contains__(self, key: tuple[int, int]) -> bool:
        return key in self._by_key


class CheckpointFile:
    """Append-only cursor history; the last valid line is the state."""

    def __init__(self, path: str):
        self.path = path
        entries, offset = _read_valid_prefix(path, parse_checkpoint_line)
        self.last: Checkpoint | None = entries[-1] if entries else None
        if os.path.exists(path) and os.path.getsize(path) > offset:
            with open(path, "r+b") as fh:
                fh.truncate(offset)
        self._fh = open(path, "a", encoding="ascii")

    def write(self, checkpoint: Checkpoint) -> None:
        self._fh.write(checkpoint.to_line() + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())
        self.last = checkpoint

    def close(self) -> None:
        self._fh.flush()
        self._fh.close()


def load_records(path: str) -> list[SmoothWindowRecord]:
    """Read a store without opening it for append (no truncation)."""
    records, _ = _read_valid_prefix(path, parse_record_line)
    out: dict[tuple[int, int], SmoothWindowRecord] = {}
    for rec in records:
        out.setdefault(rec.key(), rec)
    return sorted(out.values())
