"""Append-only event journal.

On disk the journal is a directory of segment files
(`journal/segment-<n>.log`), each a sequence of newline-delimited
canonical JSON documents in UTF-8. The first line of every segment is a
header record naming the format version and the first event seq the
segment holds. Appends are serialized, written whole, flushed, and
fsynced before they are acknowledged; a record that was acknowledged
survives a crash.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Iterator

from ..canon import canonical_line
from ..errors import IntegrityError, SchemaError, StorageError
from ..events import validate_event

FORMAT = "knet-journal"
FORMAT_VERSION = 1
DEFAULT_SEGMENT_SIZE = 512


@dataclass(frozen=True)
class EventRecord:
    seq: int
    timestamp: datetime
    actor_id: str
    kind: str
    payload: dict[str, Any]

    def to_doc(self) -> dict[str, Any]:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp.isoformat(),
            "actor_id": self.actor_id,
            "kind": self.kind,
            "payload": self.payload,
        }


def _record_from_doc(doc: dict[str, Any], expected_seq: int) -> EventRecord:
    try:
        seq = doc["seq"]
        record = EventRecord(
            seq=seq,
            timestamp=datetime.fromisoformat(doc["timestamp"]),
            actor_id=doc["actor_id"],
            kind=doc["kind"],
            payload=doc["payload"],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise IntegrityError(f"malformed journal record at seq {expected_seq}: {exc}", seq=expected_seq)
    return record


class MemoryJournal:
    """In-memory journal with the same contract as FileJournal; used by
    tests and the exhaustive model explorer where durability is noise."""

    def __init__(self) -> None:
        self._records: list[EventRecord] = []
        self._lock = threading.Lock()

    @classmethod
    def from_records(cls, records: list[EventRecord]) -> "MemoryJournal":
        clone = cls()
        clone._records = list(records)
        return clone

    @property
    def head_seq(self) -> int:
        return len(self._records)

    def append(self, timestamp: datetime, actor_id: str, kind: str, payload: dict[str, Any]) -> EventRecord:
        validate_event(kind, payload)
        with self._lock:
            record = EventRecord(len(self._records) + 1, timestamp, actor_id, kind, payload)
            self._records.append(record)
            return record

    def records(self) -> Iterator[EventRecord]:
        yield from list(self._records)

    def fork(self) -> "MemoryJournal":
        clone = MemoryJournal()
        clone._records = list(self._records)
        return clone

    def close(self) -> None:
        pass


class FileJournal:
    """Directory-of-segments journal with write-ahead durability."""

    def __init__(self, directory: Path | str, segment_size: int = DEFAULT_SEGMENT_SIZE) -> None:
        self.directory = Path(directory)
        self.segment_size = segment_size
        self._lock = threading.Lock()
        self._fh = None
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError(f"cannot create journal directory {self.directory}: {exc}")
        self._segments = self._scan_segments()
        if self._segments:
            self._discard_torn_tail()
        if not self._segments:
            self._start_segment(1, first_seq=1)
            self._head_seq = 0
        else:
            self._head_seq = self._scan_head()
            self._open_last_segment()

    # -- segment bookkeeping ------------------------------------------------

    def _segment_path(self, n: int) -> Path:
        return self.directory / f"segment-{n}.log"

    def _scan_segments(self) -> list[int]:
        numbers = []
        for path in self.directory.glob("segment-*.log"):
            stem = path.stem.split("-", 1)[1]
            if stem.isdigit():
                numbers.append(int(stem))
        numbers.sort()
        if numbers and numbers != list(range(1, len(numbers) + 1)):
            raise IntegrityError(f"journal segments are not contiguous: {numbers}")
        return numbers

    def _discard_torn_tail(self) -> None:
        """A crash can leave a partial final line in the newest segment.
        Appends fsync the whole line before acknowledging, so a torn tail
        was never acknowledged: recovery truncates it. A segment reduced
        to nothing (torn header) never held an acknowledged record and is
        dropped entirely."""
        path = self._segment_path(self._segments[-1])
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read journal segment {path}: {exc}")
        if data.endswith(b"\n"):
            return
        keep = data.rfind(b"\n") + 1
        try:
            if keep == 0:
                path.unlink()
                self._segments.pop()
            else:
                with open(path, "r+b") as fh:
                    fh.truncate(keep)
        except OSError as exc:
            raise StorageError(f"cannot repair torn journal segment {path}: {exc}")

    def _start_segment(self, n: int, first_seq: int) -> None:
        path = self._segment_path(n)
        header = {"format": FORMAT, "version": FORMAT_VERSION, "segment": n, "first_seq": first_seq}
        try:
            fh = open(path, "xb")
            fh.write(canonical_line(header))
            fh.flush()
            os.fsync(fh.fileno())
        except OSError as exc:
            raise StorageError(f"cannot start journal segment {path}: {exc}")
        self._fh = fh
        self._segments.append(n)
        self._segment_count = 0

    def _open_last_segment(self) -> None:
        path = self._segment_path(self._segments[-1])
        count = 0
        with open(path, "rb") as fh:
            for i, _line in enumerate(fh):
                if i > 0:
                    count += 1
        try:
            self._fh = open(path, "ab")
        except OSError as exc:
            raise StorageError(f"cannot open journal segment {path}: {exc}")
        self._segment_count = count

    def _scan_head(self) -> int:
        head = 0
        for record in self.records():
            head = record.seq
        return head

    # -- read path -----------------------------------------------------------

    def _read_segment(self, n: int, expected_seq: int) -> Iterator[EventRecord]:
        path = self._segment_path(n)
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise StorageError(f"cannot read journal segment {path}: {exc}")
        if data and not data.endswith(b"\n"):
            raise IntegrityError(
                f"segment {n} ends mid-record (torn write at seq {expected_seq})",
                seq=expected_seq,
            )
        for i, raw in enumerate(data.splitlines()):
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError:
                raise IntegrityError(
                    f"segment {n} line {i + 1} is not valid JSON (seq {expected_seq})",
                    seq=expected_seq,
                )
            if i == 0:
                if doc.get("format") != FORMAT:
                    raise IntegrityError(f"segment {n} has no valid header")
                if doc.get("version") != FORMAT_VERSION:
                    raise IntegrityError(f"segment {n} has unsupported version {doc.get('version')}")
                continue
            record = _record_from_doc(doc, expected_seq)
            if record.seq != expected_seq:
                raise IntegrityError(
                    f"journal gap in segment {n}: expected seq {expected_seq}, found {record.seq}",
                    seq=record.seq,
                )
            yield record
            expected_seq += 1

    def records(self) -> Iterator[EventRecord]:
        expected = 1
        for n in self._segments:
            for record in self._read_segment(n, expected):
                yield record
                expected = record.seq + 1

    @property
    def head_seq(self) -> int:
        return self._head_seq

    def segment_paths(self) -> list[Path]:
        return [self._segment_path(n) for n in self._segments]

    # -- write path ----------------------------------------------------------

    def append(self, timestamp: datetime, actor_id: str, kind: str, payload: dict[str, Any]) -> EventRecord:
        validate_event(kind, payload)
        with self._lock:
            if self._segment_count >= self.segment_size:
                self._fh.close()
                self._start_segment(self._segments[-1] + 1, first_seq=self._head_seq + 1)
            record = EventRecord(self._head_seq + 1, timestamp, actor_id, kind, payload)
            try:
                self._fh.write(canonical_line(record.to_doc()))
                self._fh.flush()
                os.fsync(self._fh.fileno())
            except OSError as exc:
                raise StorageError(f"journal append failed at seq {record.seq}: {exc}")
            self._head_seq = record.seq
            self._segment_count += 1
            return record

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
