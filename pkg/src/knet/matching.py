"""Novice-guide matching: enrollment, invitations, selection, and drops.

Each novice courts up to five guides at a time with invitations; a guide
may serve at most five novices per course. Selecting a guide supersedes
the novice's other open invitations. A course activates once every
enrolled novice has a guide.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import TYPE_CHECKING, Any

from .domain import Role, UserAccount, is_guide_eligible, normalize_course_title
from .domain.lifecycle import (
    Course,
    CourseState,
    LifecycleEvent,
    MATCHING_OPEN_STATES,
    transition_course,
)
from .errors import (
    AlreadyMatchedError,
    CapacityError,
    ConflictError,
    EligibilityError,
    NotFoundError,
    PermissionDeniedError,
    StateError,
    ValidationError,
)
from .events import applier
from .registration import require_user

if TYPE_CHECKING:
    from .state import NetworkState

MAX_OPEN_INVITATIONS = 5
MAX_NOVICES_PER_GUIDE = 5


class InvitationStatus(str, Enum):
    PENDING = "pending"
    ACCEPTED = "accepted"
    DECLINED = "declined"
    WITHDRAWN = "withdrawn"
    SUPERSEDED = "superseded"

    @property
    def active(self) -> bool:
        """Counts against the novice's open-invitation allowance."""
        return self in (InvitationStatus.PENDING, InvitationStatus.ACCEPTED)


@dataclass(frozen=True)
class GuideInvitation:
    invitation_id: str
    course_id: str
    novice_id: str
    guide_id: str
    status: InvitationStatus = InvitationStatus.PENDING


@dataclass(frozen=True)
class Match:
    course_id: str
    novice_id: str
    guide_id: str
    invitation_id: str


def match_key(course_id: str, novice_id: str) -> str:
    return f"{course_id}/{novice_id}"


def require_course(state: "NetworkState", course_id: str) -> Course:
    course = state.courses.get(course_id)
    if course is None:
        raise NotFoundError(f"no such course {course_id!r}", course_id=course_id)
    return course


def require_current_term(state: "NetworkState", course: Course) -> None:
    if course.term_id != state.open_term_id:
        raise StateError(
            f"course {course.course_id} belongs to closed term {course.term_id}",
            course_id=course.course_id,
        )


def find_match(state: "NetworkState", course_id: str, novice_id: str) -> Match | None:
    return state.matches.get(match_key(course_id, novice_id))


def course_matches(state: "NetworkState", course_id: str) -> list[Match]:
    return [m for m in state.matches.values() if m.course_id == course_id]


def guides_of_course(state: "NetworkState", course_id: str) -> set[str]:
    return {m.guide_id for m in course_matches(state, course_id)}


def all_matched(state: "NetworkState", course: Course) -> bool:
    """Every enrolled novice of the course has a selected guide
    (vacuously true with nobody enrolled)."""
    return all(find_match(state, course.course_id, n) is not None for n in course.enrolled_novices)


def is_participant(state: "NetworkState", course: Course, user_id: str) -> bool:
    if user_id == course.teacher_id:
        return True
    if user_id in course.enrolled_novices:
        return True
    return user_id in guides_of_course(state, course.course_id)


def open_invitation_count(state: "NetworkState", course_id: str, novice_id: str) -> int:
    return sum(
        1
        for inv in state.invitations.values()
        if inv.course_id == course_id and inv.novice_id == novice_id and inv.status.active
    )


def accepted_guide_count(state: "NetworkState", course_id: str, guide_id: str) -> int:
    """Novices this guide already serves in the course (selected matches)."""
    return sum(1 for m in course_matches(state, course_id) if m.guide_id == guide_id)


def list_guide_candidates(state: "NetworkState", course: Course) -> list[UserAccount]:
    """Users eligible to guide the course, excluding its teacher."""
    candidates = [
        user
        for user in state.users.values()
        if user.user_id != course.teacher_id and is_guide_eligible(user, course.title)
    ]
    candidates.sort(key=lambda u: (len(u.user_id), u.user_id))
    return candidates


# -- enrollment -------------------------------------------------------------------


def validate_open_enrollment(state: "NetworkState", actor_id: str, course_id: str) -> dict[str, Any]:
    course = require_course(state, course_id)
    require_current_term(state, course)
    if actor_id != course.teacher_id:
        raise PermissionDeniedError("only the course teacher may open enrollment", course_id=course_id)
    transition_course(course, LifecycleEvent.OPEN_ENROLLMENT)
    return {"course_id": course_id}


@applier("enrollment_opened")
def _apply_enrollment_opened(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    state.courses[course.course_id] = course.with_state(CourseState.ENROLLING)


def validate_enroll(state: "NetworkState", actor_id: str, course_id: str, novice_id: str) -> dict[str, Any]:
    course = require_course(state, course_id)
    require_current_term(state, course)
    novice = require_user(state, novice_id)
    if actor_id != novice_id:
        raise PermissionDeniedError("novices enroll themselves", course_id=course_id)
    if not novice.has_role(Role.NOVICE):
        raise PermissionDeniedError("the Novice role is required to enroll", user_id=novice_id)
    # enrollment and matching interleave: latecomers may join while others
    # already negotiate with their guide candidates
    if course.state not in MATCHING_OPEN_STATES:
        raise StateError(
            f"course {course_id} is not accepting enrollments in state {course.state.value!r}",
            course_id=course_id,
        )
    if novice_id == course.teacher_id:
        raise ConflictError("the course teacher cannot enroll as a novice", course_id=course_id)
    if novice_id in course.enrolled_novices:
        raise ConflictError(f"user {novice_id} is already enrolled", course_id=course_id)
    # One course per title per term: a second same-titled enrollment would
    # collide in the transcript when both courses close.
    title_key = normalize_course_title(course.title)
    for other in state.courses.values():
        if (
            other.term_id == course.term_id
            and novice_id in other.enrolled_novices
            and normalize_course_title(other.title) == title_key
        ):
            raise ConflictError(
                f"user {novice_id} already takes {course.title!r} this term "
                f"(course {other.course_id})",
                course_id=course_id,
            )
    return {"course_id": course_id, "novice_id": novice_id}


@applier("novice_enrolled")
def _apply_enrolled(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    state.courses[course.course_id] = course.with_enrolled(payload["novice_id"])


# -- invitations -------------------------------------------------------------------


def validate_send_invitations(
    state: "NetworkState",
    actor_id: str,
    course_id: str,
    novice_id: str,
    guide_ids: list[str],
) -> dict[str, Any]:
    course = require_course(state, course_id)
    require_current_term(state, course)
    if actor_id != novice_id:
        raise PermissionDeniedError("novices send their own invitations", course_id=course_id)
    if novice_id not in course.enrolled_novices:
        raise StateError(f"user {novice_id} is not enrolled in {course_id}", course_id=course_id)
    if course.state not in MATCHING_OPEN_STATES:
        raise StateError(
            f"course {course_id} is not matching in state {course.state.value!r}",
            course_id=course_id,
        )
    if find_match(state, course_id, novice_id) is not None:
        raise AlreadyMatchedError(f"novice {novice_id} already has a guide in {course_id}")

    if not guide_ids:
        raise ValidationError("at least one guide must be invited")
    if len(set(guide_ids)) != len(guide_ids):
        raise ValidationError("duplicate guides in one invitation batch")

    open_count = open_invitation_count(state, course_id, novice_id)
    if open_count + len(guide_ids) > MAX_OPEN_INVITATIONS:
        raise CapacityError(
            f"novice {novice_id} may hold at most {MAX_OPEN_INVITATIONS} open invitations "
            f"in {course_id} ({open_count} open, {len(guide_ids)} requested)",
            limit=MAX_OPEN_INVITATIONS,
            open=open_count,
        )

    # Pending or accepted invitations block a duplicate outright; a decline
    # also blocks (the guide already said no). Invitations the system closed
    # on the novice's behalf (superseded, withdrawn) do not.
    existing_guides = {
        inv.guide_id
        for inv in state.invitations.values()
        if inv.course_id == course_id
        and inv.novice_id == novice_id
        and inv.status
        in (InvitationStatus.PENDING, InvitationStatus.ACCEPTED, InvitationStatus.DECLINED)
    }
    invitations = []
    for guide_id in guide_ids:
        guide = require_user(state, guide_id)
        if guide_id == novice_id:
            raise ConflictError("a novice cannot invite themselves", course_id=course_id)
        if guide_id == course.teacher_id:
            raise EligibilityError("the course teacher cannot serve as guide", course_id=course_id)
        if not is_guide_eligible(guide, course.title):
            raise EligibilityError(
                f"user {guide_id} is not eligible to guide {course.title!r}",
                user_id=guide_id,
                course_id=course_id,
            )
        if guide_id in existing_guides:
            raise ConflictError(
                f"guide {guide_id} was already invited for {course_id}",
                guide_id=guide_id,
            )
        invitations.append({"invitation_id": "", "guide_id": guide_id})

    base = state.counters.get("inv", 0)
    for offset, doc in enumerate(invitations, start=1):
        doc["invitation_id"] = f"inv-{base + offset}"
    return {"course_id": course_id, "novice_id": novice_id, "invitations": invitations}


@applier("invitations_sent")
def _apply_invitations_sent(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    if course.state is CourseState.ENROLLING:
        state.courses[course.course_id] = course.with_state(CourseState.MATCHING)
    for doc in payload["invitations"]:
        invitation = GuideInvitation(
            invitation_id=doc["invitation_id"],
            course_id=payload["course_id"],
            novice_id=payload["novice_id"],
            guide_id=doc["guide_id"],
        )
        state.invitations[invitation.invitation_id] = invitation
        state.take_id("inv")


def validate_respond_invitation(
    state: "NetworkState",
    actor_id: str,
    invitation_id: str,
    accepted: bool,
) -> dict[str, Any]:
    invitation = state.invitations.get(invitation_id)
    if invitation is None:
        raise NotFoundError(f"no such invitation {invitation_id!r}")
    if actor_id != invitation.guide_id:
        raise PermissionDeniedError("only the invited guide may respond", invitation_id=invitation_id)
    if invitation.status is not InvitationStatus.PENDING:
        raise StateError(
            f"invitation {invitation_id} is already {invitation.status.value}",
            invitation_id=invitation_id,
        )
    course = require_course(state, invitation.course_id)
    require_current_term(state, course)
    if accepted:
        serving = accepted_guide_count(state, course.course_id, invitation.guide_id)
        accepted_open = sum(
            1
            for inv in state.invitations.values()
            if inv.course_id == course.course_id
            and inv.guide_id == invitation.guide_id
            and inv.status is InvitationStatus.ACCEPTED
            and find_match(state, course.course_id, inv.novice_id) is None
        )
        if serving + accepted_open >= MAX_NOVICES_PER_GUIDE:
            raise CapacityError(
                f"guide {invitation.guide_id} already serves {MAX_NOVICES_PER_GUIDE} "
                f"novices in {course.course_id}",
                limit=MAX_NOVICES_PER_GUIDE,
            )
    return {"invitation_id": invitation_id, "accepted": accepted}


@applier("invitation_answered")
def _apply_invitation_answered(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    invitation = state.invitations[payload["invitation_id"]]
    status = InvitationStatus.ACCEPTED if payload["accepted"] else InvitationStatus.DECLINED
    state.invitations[invitation.invitation_id] = replace(invitation, status=status)


# -- guide selection ----------------------------------------------------------------


def validate_select_guide(
    state: "NetworkState",
    actor_id: str,
    course_id: str,
    novice_id: str,
    invitation_id: str,
) -> dict[str, Any]:
    course = require_course(state, course_id)
    require_current_term(state, course)
    if actor_id != novice_id:
        raise PermissionDeniedError("novices select their own guide", course_id=course_id)
    if find_match(state, course_id, novice_id) is not None:
        raise AlreadyMatchedError(f"novice {novice_id} already has a guide in {course_id}")
    invitation = state.invitations.get(invitation_id)
    if invitation is None:
        raise NotFoundError(f"no such invitation {invitation_id!r}")
    if invitation.course_id != course_id or invitation.novice_id != novice_id:
        raise ValidationError(
            f"invitation {invitation_id} does not belong to {novice_id} in {course_id}"
        )
    if invitation.status is not InvitationStatus.ACCEPTED:
        raise StateError(
            f"invitation {invitation_id} is {invitation.status.value}, not accepted",
            invitation_id=invitation_id,
        )
    serving = accepted_guide_count(state, course_id, invitation.guide_id)
    if serving >= MAX_NOVICES_PER_GUIDE:
        raise CapacityError(
            f"guide {invitation.guide_id} already serves {MAX_NOVICES_PER_GUIDE} novices in {course_id}",
            limit=MAX_NOVICES_PER_GUIDE,
        )
    superseded = sorted(
        inv.invitation_id
        for inv in state.invitations.values()
        if inv.course_id == course_id
        and inv.novice_id == novice_id
        and inv.invitation_id != invitation_id
        and inv.status in (InvitationStatus.PENDING, InvitationStatus.ACCEPTED)
    )
    return {
        "course_id": course_id,
        "novice_id": novice_id,
        "guide_id": invitation.guide_id,
        "invitation_id": invitation_id,
        "superseded_invitation_ids": superseded,
    }


@applier("guide_selected")
def _apply_guide_selected(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course_id = payload["course_id"]
    state.matches[match_key(course_id, payload["novice_id"])] = Match(
        course_id=course_id,
        novice_id=payload["novice_id"],
        guide_id=payload["guide_id"],
        invitation_id=payload["invitation_id"],
    )
    for invitation_id in payload["superseded_invitation_ids"]:
        invitation = state.invitations[invitation_id]
        state.invitations[invitation_id] = replace(invitation, status=InvitationStatus.SUPERSEDED)
    _maybe_activate(state, course_id)


# -- dropping a novice ----------------------------------------------------------------


def validate_drop_novice(state: "NetworkState", actor_id: str, course_id: str, novice_id: str) -> dict[str, Any]:
    course = require_course(state, course_id)
    require_current_term(state, course)
    if actor_id != course.teacher_id:
        raise PermissionDeniedError(
            "only the course teacher may drop an enrollment",
            course_id=course_id,
        )
    if novice_id not in course.enrolled_novices:
        raise NotFoundError(f"user {novice_id} is not enrolled in {course_id}", course_id=course_id)
    if course.state not in MATCHING_OPEN_STATES:
        raise StateError(
            f"enrollment in {course_id} is settled; state {course.state.value!r}",
            course_id=course_id,
        )
    if find_match(state, course_id, novice_id) is not None:
        raise AlreadyMatchedError(
            f"novice {novice_id} is already matched in {course_id} and cannot be dropped"
        )
    withdrawn = sorted(
        inv.invitation_id
        for inv in state.invitations.values()
        if inv.course_id == course_id
        and inv.novice_id == novice_id
        and inv.status in (InvitationStatus.PENDING, InvitationStatus.ACCEPTED)
    )
    return {"course_id": course_id, "novice_id": novice_id, "withdrawn_invitation_ids": withdrawn}


@applier("novice_dropped")
def _apply_novice_dropped(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    state.courses[course.course_id] = course.without_enrolled(payload["novice_id"])
    for invitation_id in payload["withdrawn_invitation_ids"]:
        invitation = state.invitations[invitation_id]
        state.invitations[invitation_id] = replace(invitation, status=InvitationStatus.WITHDRAWN)
    _maybe_activate(state, payload["course_id"])


def _maybe_activate(state: "NetworkState", course_id: str) -> None:
    """Move a matching course to Active once every enrolled novice has a guide."""
    course = state.courses[course_id]
    if course.state in MATCHING_OPEN_STATES and all_matched(state, course):
        state.courses[course_id] = transition_course(course, LifecycleEvent.ALL_MATCHED)
