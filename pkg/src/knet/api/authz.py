"""The role/action authorization matrix.

Every HTTP action is named in a closed catalog and granted to explicit
roles; anything not granted is denied. `ANY` marks actions open to any
authenticated account regardless of role (resource-scoped checks still
apply downstream in the command validators).
"""

from __future__ import annotations

from ..domain import Role
from ..errors import NotFoundError, PermissionDeniedError

ANY = "any"

# action -> roles granted ("any" = any authenticated account)
MATRIX: dict[str, frozenset[str]] = {
    # administration
    "approve_teacher": frozenset({Role.ADMIN.value}),
    "approve_course": frozenset({Role.ADMIN.value}),
    "view_approvals": frozenset({Role.ADMIN.value}),
    "rollover_term": frozenset({Role.ADMIN.value}),
    "set_clock": frozenset({Role.ADMIN.value}),
    "view_journal": frozenset({Role.ADMIN.value}),
    # the teacher's course
    "request_course": frozenset({Role.TEACHER.value}),
    "open_enrollment": frozenset({Role.TEACHER.value}),
    "publish_material": frozenset({Role.TEACHER.value}),
    "create_assignment": frozenset({Role.TEACHER.value}),
    "activate_assignment": frozenset({Role.TEACHER.value}),
    "edit_assignment": frozenset({Role.TEACHER.value}),
    "teacher_grade": frozenset({Role.TEACHER.value}),
    "void_submission": frozenset({Role.TEACHER.value}),
    "close_course": frozenset({Role.TEACHER.value}),
    "post_announcement": frozenset({Role.TEACHER.value}),
    "answer_question": frozenset({Role.TEACHER.value}),
    # the novice's path
    "enroll": frozenset({Role.NOVICE.value}),
    "send_invitations": frozenset({Role.NOVICE.value}),
    "select_guide": frozenset({Role.NOVICE.value}),
    "submit_work": frozenset({Role.NOVICE.value}),
    "ask_teacher": frozenset({Role.NOVICE.value}),
    # dropping: the teacher's escape hatch for matching deadlocks
    "drop_novice": frozenset({Role.TEACHER.value}),
    # the guide's duties
    "respond_invitation": frozenset({Role.GUIDE_STUDENT.value, Role.GUIDE_ALUMNI.value}),
    "guide_evaluate": frozenset({Role.GUIDE_STUDENT.value, Role.GUIDE_ALUMNI.value}),
    # the matched pair's thread
    "post_feedback": frozenset(
        {Role.NOVICE.value, Role.GUIDE_STUDENT.value, Role.GUIDE_ALUMNI.value}
    ),
    # course community
    "open_discussion": frozenset(
        {
            Role.NOVICE.value,
            Role.GUIDE_STUDENT.value,
            Role.GUIDE_ALUMNI.value,
            Role.TEACHER.value,
        }
    ),
    "reply_discussion": frozenset(
        {
            Role.NOVICE.value,
            Role.GUIDE_STUDENT.value,
            Role.GUIDE_ALUMNI.value,
            Role.TEACHER.value,
        }
    ),
    # open to any authenticated account (resource checks downstream)
    "apply_for_teacher": frozenset({ANY}),
    "set_photo": frozenset({ANY}),
    "upload_attachment": frozenset({ANY}),
    "view_users": frozenset({ANY}),
    "view_portfolio": frozenset({ANY}),
    "view_courses": frozenset({ANY}),
    "view_course": frozenset({ANY}),
    "view_roster": frozenset({ANY}),
    "view_candidates": frozenset({ANY}),
    "view_invitations": frozenset({ANY}),
    "view_materials": frozenset({ANY}),
    "view_assignments": frozenset({ANY}),
    "view_submissions": frozenset({ANY}),
    "view_grades": frozenset({ANY}),
    "view_announcements": frozenset({ANY}),
    "view_questions": frozenset({ANY}),
    "view_discussions": frozenset({ANY}),
    "view_terms": frozenset({ANY}),
}

ACTIONS = frozenset(MATRIX)
ROLES = frozenset(role.value for role in Role)


def decide(roles: frozenset[str] | set[str], action: str) -> bool:
    """allow/deny for a role set; unknown actions are an error, not a deny."""
    granted = MATRIX.get(action)
    if granted is None:
        raise NotFoundError(f"unknown action {action!r}", action=action)
    if ANY in granted:
        return True
    return bool(granted & set(roles))


def require(roles: frozenset[str] | set[str], action: str) -> None:
    if not decide(roles, action):
        raise PermissionDeniedError(
            f"action {action!r} is not granted to roles {sorted(roles) or ['(none)']}",
            action=action,
        )


def matrix_doc() -> dict[str, object]:
    return {
        "roles": sorted(ROLES),
        "actions": {action: sorted(granted) for action, granted in sorted(MATRIX.items())},
    }
