"""Journal linter: order and well-formedness checks on raw records.

The linter never replays state; it re-derives its verdicts from the
record stream alone so it can serve as an independent check on the
command layer. Its headline rule: for every submission, no grading
event may precede the guide's approving evaluation.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from ..errors import SchemaError
from ..events import validate_event
from .journal import EventRecord, FileJournal

# Per-submission pipeline automaton: linted states are a projection of
# the live ones onto the events that move a submission.
_INITIAL = "drafting"
_PIPELINE: dict[tuple[str, str], str] = {
    ("drafting", "work_submitted"): "awaiting_guide",
    ("awaiting_guide", "submission_evaluated/approve"): "forwarded_to_teacher",
    ("awaiting_guide", "submission_evaluated/revise"): "drafting",
    ("forwarded_to_teacher", "submission_graded"): "graded",
}
_VOIDABLE = {"drafting", "awaiting_guide", "forwarded_to_teacher"}


def lint_records(records: Iterable[EventRecord]) -> list[str]:
    problems: list[str] = []
    expected_seq = 1
    submission_state: dict[str, str] = {}
    evaluated_once: set[str] = set()

    for record in records:
        if record.seq != expected_seq:
            problems.append(f"seq {record.seq}: expected {expected_seq} (gap or duplicate)")
            expected_seq = record.seq + 1
        else:
            expected_seq += 1
        try:
            validate_event(record.kind, record.payload)
        except SchemaError as exc:
            problems.append(f"seq {record.seq}: {exc}")
            continue

        kind = record.kind
        if kind == "assignment_activated":
            for doc in record.payload["submissions"]:
                sid = doc["submission_id"]
                if sid in submission_state:
                    problems.append(f"seq {record.seq}: submission {sid} created twice")
                submission_state[sid] = _INITIAL
        elif kind in ("work_submitted", "submission_evaluated", "submission_graded", "submission_voided"):
            sid = record.payload["submission_id"]
            current = submission_state.get(sid)
            if current is None:
                problems.append(f"seq {record.seq}: {kind} for unknown submission {sid}")
                continue
            if kind == "submission_voided":
                if current in _VOIDABLE:
                    submission_state[sid] = "voided"
                else:
                    problems.append(
                        f"seq {record.seq}: submission {sid} voided while {current}"
                    )
                continue
            step = kind
            if kind == "submission_evaluated":
                step = f"submission_evaluated/{record.payload['verdict']}"
            if kind == "submission_graded" and sid not in evaluated_once:
                problems.append(
                    f"seq {record.seq}: submission {sid} graded before any guide evaluation"
                )
            successor = _PIPELINE.get((current, step))
            if successor is None:
                problems.append(
                    f"seq {record.seq}: {kind} not legal for submission {sid} in state {current}"
                )
                continue
            if kind == "submission_evaluated":
                evaluated_once.add(sid)
            submission_state[sid] = successor
    return problems


def lint_directory(data_dir: Path | str) -> list[str]:
    """Lint a data directory's journal as stored on disk."""
    journal = FileJournal(Path(data_dir) / "journal")
    try:
        return lint_records(journal.records())
    finally:
        journal.close()
