"""Materialized state and deterministic replay.

`NetworkState` holds every aggregate, keyed by id. It is only ever
mutated by event appliers, so folding a journal from seq 1 reproduces
the state of the live process byte-for-byte (timestamps are recorded in
the journal but never influence state).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable

from . import events
from .canon import canonical_dumps
from .errors import IntegrityError

if TYPE_CHECKING:
    from .coursework import (
        Announcement,
        Assignment,
        DiscussionThread,
        Material,
        PortfolioEntry,
        Question,
        Submission,
    )
    from .domain import Course, Term, UserAccount
    from .matching import GuideInvitation, Match
    from .registration import TeacherApplication
    from .store.journal import EventRecord


@dataclass
class NetworkState:
    terms: dict[str, "Term"] = field(default_factory=dict)
    open_term_id: str | None = None
    users: dict[str, "UserAccount"] = field(default_factory=dict)
    applications: dict[str, "TeacherApplication"] = field(default_factory=dict)
    courses: dict[str, "Course"] = field(default_factory=dict)
    invitations: dict[str, "GuideInvitation"] = field(default_factory=dict)
    # keyed "<course_id>/<novice_id>"; at most one match per key, ever
    matches: dict[str, "Match"] = field(default_factory=dict)
    materials: dict[str, "Material"] = field(default_factory=dict)
    assignments: dict[str, "Assignment"] = field(default_factory=dict)
    submissions: dict[str, "Submission"] = field(default_factory=dict)
    announcements: dict[str, "Announcement"] = field(default_factory=dict)
    questions: dict[str, "Question"] = field(default_factory=dict)
    discussions: dict[str, "DiscussionThread"] = field(default_factory=dict)
    portfolio: dict[str, "PortfolioEntry"] = field(default_factory=dict)
    counters: dict[str, int] = field(default_factory=dict)

    def next_id(self, prefix: str) -> str:
        """Peek the next id for a counter without consuming it."""
        return f"{prefix}-{self.counters.get(prefix, 0) + 1}"

    def take_id(self, prefix: str) -> str:
        n = self.counters.get(prefix, 0) + 1
        self.counters[prefix] = n
        return f"{prefix}-{n}"


def apply_event(state: NetworkState, record: "EventRecord") -> None:
    """Fold one journal record into the state. Must not fail: command
    validators guarantee applicability before anything is appended."""
    fn = events.APPLIERS.get(record.kind)
    if fn is None:
        raise IntegrityError(f"no applier for event kind {record.kind!r}", seq=record.seq)
    fn(state, record.seq, record.actor_id, record.payload)


@dataclass(frozen=True)
class Snapshot:
    as_of_seq: int
    state: NetworkState

    def state_doc(self) -> dict[str, Any]:
        from .canon import to_doc

        return to_doc(self.state)

    def canonical_bytes(self) -> bytes:
        doc = {"as_of_seq": self.as_of_seq, "state": self.state_doc()}
        return canonical_dumps(doc).encode("utf-8")


def replay(records: Iterable["EventRecord"]) -> Snapshot:
    """Rebuild state from scratch. Rejects sequence gaps."""
    # Command modules register their appliers on import.
    from . import coursework, matching, registration  # noqa: F401

    state = NetworkState()
    expected = 1
    last = 0
    for record in records:
        if record.seq != expected:
            raise IntegrityError(
                f"journal gap: expected seq {expected}, found {record.seq}",
                seq=record.seq,
            )
        apply_event(state, record)
        last = record.seq
        expected += 1
    return Snapshot(as_of_seq=last, state=state)
