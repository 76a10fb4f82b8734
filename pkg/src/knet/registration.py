"""Registration, teacher applications, admin approvals, and terms.

Command functions validate against the current state and return the
event payload to journal; the paired appliers fold the event in. A
validator may raise; an applier never does.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from typing import TYPE_CHECKING, Any

from .domain import (
    LetterGrade,
    ProfileInfo,
    Role,
    Term,
    TranscriptEntry,
    UserAccount,
    letter_lower_bound,
    map_score_to_letter,
)
from .domain.lifecycle import Course, CourseState, LifecycleEvent, transition_course
from .errors import (
    CompletenessError,
    ConflictError,
    NotFoundError,
    PermissionDeniedError,
    StateError,
    ValidationError,
)
from .events import applier

if TYPE_CHECKING:
    from .state import NetworkState

# Term that holds transcript entries brought in at registration.
PRIOR_TERM_ID = "t-0"


class ApplicationStatus(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    DENIED = "denied"


class RoleIntent(str, Enum):
    STUDENT = "student"
    ALUMNI = "alumni"
    TEACHER = "teacher"


INTENT_ROLES: dict[RoleIntent, frozenset[Role]] = {
    RoleIntent.STUDENT: frozenset({Role.NOVICE, Role.GUIDE_STUDENT}),
    RoleIntent.ALUMNI: frozenset({Role.GUIDE_ALUMNI}),
    RoleIntent.TEACHER: frozenset(),
}


@dataclass(frozen=True)
class TeacherApplication:
    application_id: str
    user_id: str
    university: str
    faculty: str
    department: str
    teachable_courses: tuple[str, ...]
    status: ApplicationStatus = ApplicationStatus.PENDING
    reason: str | None = None


def find_user_by_name(state: "NetworkState", display_name: str) -> UserAccount | None:
    for user in state.users.values():
        if user.display_name == display_name:
            return user
    return None


def require_user(state: "NetworkState", user_id: str) -> UserAccount:
    user = state.users.get(user_id)
    if user is None:
        raise NotFoundError(f"no such user {user_id!r}", user_id=user_id)
    return user


def require_admin(state: "NetworkState", actor_id: str) -> UserAccount:
    actor = require_user(state, actor_id)
    if not actor.has_role(Role.ADMIN):
        raise PermissionDeniedError("administrator role required", user_id=actor_id)
    return actor


# -- bootstrap ----------------------------------------------------------------


def validate_bootstrap(admin_display_name: str, admin_password_digest: str) -> dict[str, Any]:
    if not admin_display_name:
        raise ValidationError("admin display name must not be empty")
    return {
        "admin_user_id": "u-1",
        "admin_display_name": admin_display_name,
        "admin_password_digest": admin_password_digest,
        "prior_term_id": PRIOR_TERM_ID,
        "first_term_id": "t-1",
        "first_term_label": "Term 1",
    }


@applier("system_bootstrapped")
def _apply_bootstrap(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    state.terms[payload["prior_term_id"]] = Term(payload["prior_term_id"], "Prior learning", open=False)
    state.terms[payload["first_term_id"]] = Term(payload["first_term_id"], payload["first_term_label"], open=True)
    state.open_term_id = payload["first_term_id"]
    state.counters["t"] = 1
    state.counters["u"] = 1
    state.users[payload["admin_user_id"]] = UserAccount(
        user_id=payload["admin_user_id"],
        display_name=payload["admin_display_name"],
        password_digest=payload["admin_password_digest"],
        roles=frozenset({Role.ADMIN}),
    )


# -- registration --------------------------------------------------------------


def _intake_transcript(role_intent: RoleIntent, prior_courses: list[dict[str, Any]]) -> list[dict[str, Any]]:
    entries: list[dict[str, Any]] = []
    seen: set[str] = set()
    for item in prior_courses:
        title = str(item.get("course_title", "")).strip()
        if not title:
            raise ValidationError("prior course entry is missing a course title")
        if role_intent is RoleIntent.ALUMNI:
            raw_letter = item.get("letter_grade")
            try:
                letter = LetterGrade(raw_letter)
            except ValueError:
                raise ValidationError(f"unknown letter grade {raw_letter!r}", course_title=title)
            numeric = letter_lower_bound(letter)
        else:
            numeric = item.get("numeric_grade")
            if not isinstance(numeric, (int, float)) or isinstance(numeric, bool):
                raise ValidationError("prior course entry needs a numeric grade", course_title=title)
            numeric = float(numeric)
            letter = map_score_to_letter(numeric)
        entry = TranscriptEntry(title, PRIOR_TERM_ID, letter, float(numeric))
        if entry.title_key in seen:
            raise ValidationError(f"duplicate prior course {title!r}")
        seen.add(entry.title_key)
        entries.append(
            {
                "course_title": title,
                "term_id": PRIOR_TERM_ID,
                "letter_grade": letter.value,
                "numeric_grade": float(numeric),
            }
        )
    return entries


def validate_register(
    state: "NetworkState",
    display_name: str,
    password_digest: str,
    role_intent: str,
    intake: dict[str, Any],
) -> dict[str, Any]:
    if not display_name or not display_name.strip():
        raise ValidationError("display name must not be empty")
    try:
        intent = RoleIntent(role_intent)
    except ValueError:
        raise ValidationError(f"unknown role intent {role_intent!r}")
    if find_user_by_name(state, display_name) is not None:
        raise ConflictError(f"display name {display_name!r} is already registered")

    profile = {
        "university": str(intake.get("university", "")),
        "faculty": str(intake.get("faculty", "")),
        "department": str(intake.get("department", "")),
        "teachable_courses": [],
        "photo_ref": None,
    }
    payload: dict[str, Any] = {
        "user_id": state.next_id("u"),
        "display_name": display_name,
        "password_digest": password_digest,
        "roles": sorted(role.value for role in INTENT_ROLES[intent]),
        "profile": profile,
        "transcript": _intake_transcript(intent, list(intake.get("prior_courses", []))),
    }
    if intent is RoleIntent.TEACHER:
        teachable = [str(t).strip() for t in intake.get("teachable_courses", []) if str(t).strip()]
        if not teachable:
            raise ValidationError("teacher registration requires at least one teachable course")
        profile["teachable_courses"] = teachable
        payload["application_id"] = state.next_id("app")
    return payload


@applier("user_registered")
def _apply_register(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    profile_doc = payload["profile"]
    profile = ProfileInfo(
        university=profile_doc["university"],
        faculty=profile_doc["faculty"],
        department=profile_doc["department"],
        teachable_courses=tuple(profile_doc["teachable_courses"]),
        photo_ref=profile_doc["photo_ref"],
    )
    transcript = tuple(
        TranscriptEntry(
            course_title=entry["course_title"],
            term_id=entry["term_id"],
            letter_grade=LetterGrade(entry["letter_grade"]),
            numeric_grade=entry["numeric_grade"],
        )
        for entry in payload["transcript"]
    )
    user = UserAccount(
        user_id=payload["user_id"],
        display_name=payload["display_name"],
        password_digest=payload["password_digest"],
        roles=frozenset(Role(r) for r in payload["roles"]),
        profile=profile,
        transcript=transcript,
    )
    state.users[user.user_id] = user
    state.take_id("u")
    application_id = payload.get("application_id")
    if application_id is not None:
        state.applications[application_id] = TeacherApplication(
            application_id=application_id,
            user_id=user.user_id,
            university=profile.university,
            faculty=profile.faculty,
            department=profile.department,
            teachable_courses=profile.teachable_courses,
        )
        state.take_id("app")


# -- teacher applications -------------------------------------------------------


def validate_apply_for_teacher(
    state: "NetworkState",
    actor_id: str,
    university: str,
    faculty: str,
    department: str,
    teachable_courses: list[str],
) -> dict[str, Any]:
    require_user(state, actor_id)
    teachable = [str(t).strip() for t in teachable_courses if str(t).strip()]
    if not teachable:
        raise ValidationError("at least one teachable course is required")
    for application in state.applications.values():
        if application.user_id == actor_id and application.status is ApplicationStatus.PENDING:
            raise ConflictError(
                "a teacher application is already pending",
                application_id=application.application_id,
            )
    return {
        "application_id": state.next_id("app"),
        "user_id": actor_id,
        "university": str(university),
        "faculty": str(faculty),
        "department": str(department),
        "teachable_courses": teachable,
    }


@applier("teacher_application_submitted")
def _apply_teacher_application(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    application = TeacherApplication(
        application_id=payload["application_id"],
        user_id=payload["user_id"],
        university=payload["university"],
        faculty=payload["faculty"],
        department=payload["department"],
        teachable_courses=tuple(payload["teachable_courses"]),
    )
    state.applications[application.application_id] = application
    state.take_id("app")
    user = state.users[application.user_id]
    state.users[user.user_id] = replace(
        user,
        profile=replace(
            user.profile,
            university=application.university,
            faculty=application.faculty,
            department=application.department,
            teachable_courses=application.teachable_courses,
        ),
    )


def validate_decide_application(
    state: "NetworkState",
    actor_id: str,
    application_id: str,
    decision: str,
    reason: str | None,
) -> dict[str, Any]:
    require_admin(state, actor_id)
    application = state.applications.get(application_id)
    if application is None:
        raise NotFoundError(f"no such teacher application {application_id!r}")
    if application.status is not ApplicationStatus.PENDING:
        raise StateError(
            f"application already {application.status.value}",
            application_id=application_id,
        )
    if decision not in ("approved", "denied"):
        raise ValidationError(f"decision must be 'approved' or 'denied', got {decision!r}")
    payload: dict[str, Any] = {"application_id": application_id, "decision": decision}
    if reason:
        payload["reason"] = reason
    return payload


@applier("application_decided")
def _apply_application_decided(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    application = state.applications[payload["application_id"]]
    status = ApplicationStatus(payload["decision"])
    state.applications[application.application_id] = replace(
        application, status=status, reason=payload.get("reason")
    )
    if status is ApplicationStatus.APPROVED:
        user = state.users[application.user_id]
        state.users[user.user_id] = user.with_role(Role.TEACHER)


# -- course requests --------------------------------------------------------------


def validate_request_course(
    state: "NetworkState",
    actor_id: str,
    title: str,
    content: str,
    start_date: date,
    end_date: date,
) -> dict[str, Any]:
    actor = require_user(state, actor_id)
    if not actor.has_role(Role.TEACHER):
        raise PermissionDeniedError("only approved teachers may request courses", user_id=actor_id)
    if not title or not title.strip():
        raise ValidationError("course title must not be empty")
    if start_date > end_date:
        raise ValidationError(
            f"course start {start_date.isoformat()} is after end {end_date.isoformat()}"
        )
    if state.open_term_id is None:
        raise StateError("no open term to place the course in")
    return {
        "course_id": state.next_id("c"),
        "teacher_id": actor_id,
        "title": title,
        "content": content,
        "term_id": state.open_term_id,
        "start_date": start_date.isoformat(),
        "end_date": end_date.isoformat(),
    }


@applier("course_requested")
def _apply_course_requested(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = Course(
        course_id=payload["course_id"],
        title=payload["title"],
        content=payload["content"],
        teacher_id=payload["teacher_id"],
        term_id=payload["term_id"],
        start_date=date.fromisoformat(payload["start_date"]),
        end_date=date.fromisoformat(payload["end_date"]),
    )
    state.courses[course.course_id] = course
    state.take_id("c")


def validate_decide_course(
    state: "NetworkState",
    actor_id: str,
    course_id: str,
    decision: str,
    reason: str | None,
) -> dict[str, Any]:
    require_admin(state, actor_id)
    course = state.courses.get(course_id)
    if course is None:
        raise NotFoundError(f"no such course {course_id!r}", course_id=course_id)
    if course.decided:
        raise StateError(f"course {course_id} is already decided", course_id=course_id)
    if decision not in ("approved", "denied"):
        raise ValidationError(f"decision must be 'approved' or 'denied', got {decision!r}")
    payload: dict[str, Any] = {"course_id": course_id, "decision": decision}
    if reason:
        payload["reason"] = reason
    return payload


@applier("course_decided")
def _apply_course_decided(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    if payload["decision"] == "approved":
        state.courses[course.course_id] = transition_course(course, LifecycleEvent.APPROVE)
    else:
        state.courses[course.course_id] = replace(
            course, denial_reason=payload.get("reason") or "denied"
        )


# -- profile photo ---------------------------------------------------------------


def validate_set_photo(state: "NetworkState", actor_id: str, user_id: str, attachment_id: str) -> dict[str, Any]:
    require_user(state, user_id)
    if actor_id != user_id:
        raise PermissionDeniedError("only the account owner may change the photo")
    if not attachment_id:
        raise ValidationError("attachment id must not be empty")
    return {"user_id": user_id, "attachment_id": attachment_id}


@applier("profile_photo_set")
def _apply_photo(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    user = state.users[payload["user_id"]]
    state.users[user.user_id] = replace(user, profile=replace(user.profile, photo_ref=payload["attachment_id"]))


# -- term rollover ----------------------------------------------------------------


def validate_rollover_term(state: "NetworkState", actor_id: str) -> dict[str, Any]:
    require_admin(state, actor_id)
    if state.open_term_id is None:
        raise StateError("no open term")
    blocking = sorted(
        course.course_id
        for course in state.courses.values()
        if course.term_id == state.open_term_id and course.state is CourseState.ACTIVE
    )
    if blocking:
        raise CompletenessError(
            f"open courses remain in term {state.open_term_id}: {', '.join(blocking)}",
            course_ids=blocking,
        )
    new_n = state.counters.get("t", 1) + 1
    return {
        "closed_term_id": state.open_term_id,
        "new_term_id": f"t-{new_n}",
        "new_term_label": f"Term {new_n}",
    }


@applier("term_rolled_over")
def _apply_rollover(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    closed = state.terms[payload["closed_term_id"]]
    state.terms[closed.term_id] = replace(closed, open=False)
    state.terms[payload["new_term_id"]] = Term(payload["new_term_id"], payload["new_term_label"], open=True)
    state.open_term_id = payload["new_term_id"]
    state.take_id("t")
