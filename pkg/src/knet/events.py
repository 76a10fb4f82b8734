"""Closed event catalog and the applier registry.

Every state mutation in the system is one of the kinds below. The
journal refuses anything outside the catalog or missing required
payload fields; appliers (registered by the command modules) fold an
accepted event into the materialized state and must never fail.
"""

from __future__ import annotations

from typing import Any, Callable

from .errors import SchemaError

# kind -> (required payload fields, optional payload fields)
CATALOG: dict[str, tuple[frozenset[str], frozenset[str]]] = {
    "system_bootstrapped": (
        frozenset({"admin_user_id", "admin_display_name", "admin_password_digest", "prior_term_id", "first_term_id", "first_term_label"}),
        frozenset(),
    ),
    "user_registered": (
        frozenset({"user_id", "display_name", "password_digest", "roles", "profile", "transcript"}),
        frozenset({"application_id"}),
    ),
    "teacher_application_submitted": (
        frozenset({"application_id", "user_id", "university", "faculty", "department", "teachable_courses"}),
        frozenset(),
    ),
    "application_decided": (
        frozenset({"application_id", "decision"}),
        frozenset({"reason"}),
    ),
    "course_requested": (
        frozenset({"course_id", "teacher_id", "title", "content", "term_id", "start_date", "end_date"}),
        frozenset(),
    ),
    "course_decided": (
        frozenset({"course_id", "decision"}),
        frozenset({"reason"}),
    ),
    "enrollment_opened": (frozenset({"course_id"}), frozenset()),
    "novice_enrolled": (frozenset({"course_id", "novice_id"}), frozenset()),
    "invitations_sent": (
        frozenset({"course_id", "novice_id", "invitations"}),
        frozenset(),
    ),
    "invitation_answered": (frozenset({"invitation_id", "accepted"}), frozenset()),
    "guide_selected": (
        frozenset({"course_id", "novice_id", "guide_id", "invitation_id", "superseded_invitation_ids"}),
        frozenset(),
    ),
    "novice_dropped": (
        frozenset({"course_id", "novice_id", "withdrawn_invitation_ids"}),
        frozenset(),
    ),
    "material_published": (
        frozenset({"material_id", "course_id", "attachment"}),
        frozenset({"caption"}),
    ),
    "assignment_created": (
        frozenset({"assignment_id", "course_id", "title", "start_date", "deadline", "sequence_no"}),
        frozenset({"body"}),
    ),
    "assignment_activated": (
        frozenset({"assignment_id", "submissions"}),
        frozenset(),
    ),
    "assignment_edited": (frozenset({"assignment_id", "deadline"}), frozenset()),
    "work_submitted": (frozenset({"submission_id", "attachments"}), frozenset()),
    "feedback_posted": (
        frozenset({"submission_id", "author_id", "body"}),
        frozenset(),
    ),
    "submission_evaluated": (
        frozenset({"submission_id", "verdict", "comments"}),
        frozenset(),
    ),
    "submission_graded": (
        frozenset({"submission_id", "score", "portfolio_entry_id"}),
        frozenset(),
    ),
    "submission_voided": (frozenset({"submission_id"}), frozenset()),
    "course_closed": (
        frozenset({"course_id", "final_grades"}),
        frozenset(),
    ),
    "announcement_posted": (
        frozenset({"announcement_id", "course_id", "body"}),
        frozenset(),
    ),
    "question_asked": (
        frozenset({"question_id", "course_id", "novice_id", "body"}),
        frozenset(),
    ),
    "question_answered": (frozenset({"question_id", "body"}), frozenset()),
    "discussion_opened": (
        frozenset({"discussion_id", "course_id", "author_id", "topic", "body"}),
        frozenset(),
    ),
    "discussion_replied": (
        frozenset({"discussion_id", "author_id", "body"}),
        frozenset(),
    ),
    "profile_photo_set": (frozenset({"user_id", "attachment_id"}), frozenset()),
    "term_rolled_over": (
        frozenset({"closed_term_id", "new_term_id", "new_term_label"}),
        frozenset(),
    ),
}


def validate_event(kind: str, payload: dict[str, Any]) -> None:
    """Reject events outside the catalog or with a malformed payload."""
    spec = CATALOG.get(kind)
    if spec is None:
        raise SchemaError(f"unknown event kind {kind!r}", kind=kind)
    if not isinstance(payload, dict):
        raise SchemaError(f"payload for {kind!r} must be a mapping", kind=kind)
    required, optional = spec
    missing = required - payload.keys()
    if missing:
        raise SchemaError(
            f"payload for {kind!r} is missing fields: {', '.join(sorted(missing))}",
            kind=kind,
            missing=sorted(missing),
        )
    unknown = payload.keys() - required - optional
    if unknown:
        raise SchemaError(
            f"payload for {kind!r} has unknown fields: {', '.join(sorted(unknown))}",
            kind=kind,
            unknown=sorted(unknown),
        )


# Populated via @applier by the command modules at import time.
Applier = Callable[..., None]
APPLIERS: dict[str, Applier] = {}


def applier(kind: str) -> Callable[[Applier], Applier]:
    if kind not in CATALOG:
        raise SchemaError(f"cannot register applier for unknown kind {kind!r}")

    def register(fn: Applier) -> Applier:
        APPLIERS[kind] = fn
        return fn

    return register
