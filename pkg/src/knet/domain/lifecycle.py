"""Course aggregate and its lifecycle state machine.

    Requested --approve--> Approved --open_enrollment--> Enrolling
    Enrolling ~~first invitation~~> Matching        (implicit shift)
    Enrolling | Matching --all_matched--> Active --close--> Closed

`transition_course` owns the four explicit edges; the Enrolling to
Matching shift happens when the first guide invitation goes out and is
applied by the matching layer directly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum

from ..errors import TransitionError, ValidationError


class CourseState(str, Enum):
    REQUESTED = "requested"
    APPROVED = "approved"
    ENROLLING = "enrolling"
    MATCHING = "matching"
    ACTIVE = "active"
    CLOSED = "closed"


class LifecycleEvent(str, Enum):
    APPROVE = "approve"
    OPEN_ENROLLMENT = "open_enrollment"
    ALL_MATCHED = "all_matched"
    CLOSE = "close"


TRANSITIONS: dict[tuple[CourseState, LifecycleEvent], CourseState] = {
    (CourseState.REQUESTED, LifecycleEvent.APPROVE): CourseState.APPROVED,
    (CourseState.APPROVED, LifecycleEvent.OPEN_ENROLLMENT): CourseState.ENROLLING,
    (CourseState.ENROLLING, LifecycleEvent.ALL_MATCHED): CourseState.ACTIVE,
    (CourseState.MATCHING, LifecycleEvent.ALL_MATCHED): CourseState.ACTIVE,
    (CourseState.ACTIVE, LifecycleEvent.CLOSE): CourseState.CLOSED,
}

# States in which novices may enroll and invitations may be exchanged.
MATCHING_OPEN_STATES = frozenset({CourseState.ENROLLING, CourseState.MATCHING})

# States in which course materials are visible to matched participants.
MATERIAL_VISIBLE_STATES = frozenset({CourseState.ACTIVE, CourseState.CLOSED})


@dataclass(frozen=True)
class Course:
    course_id: str
    title: str
    content: str
    teacher_id: str
    term_id: str
    start_date: date
    end_date: date
    state: CourseState = CourseState.REQUESTED
    enrolled_novices: tuple[str, ...] = ()
    denial_reason: str | None = None

    @property
    def decided(self) -> bool:
        return self.state is not CourseState.REQUESTED or self.denial_reason is not None

    def __post_init__(self) -> None:
        if self.start_date > self.end_date:
            raise ValidationError(
                f"course start {self.start_date} is after end {self.end_date}",
                course_id=self.course_id,
            )

    def with_state(self, state: CourseState) -> "Course":
        return replace(self, state=state)

    def with_enrolled(self, novice_id: str) -> "Course":
        return replace(self, enrolled_novices=self.enrolled_novices + (novice_id,))

    def without_enrolled(self, novice_id: str) -> "Course":
        remaining = tuple(n for n in self.enrolled_novices if n != novice_id)
        return replace(self, enrolled_novices=remaining)


def transition_course(course: Course, event: LifecycleEvent) -> Course:
    """Apply one lifecycle event; every undeclared edge is rejected."""
    successor = TRANSITIONS.get((course.state, event))
    if successor is None:
        raise TransitionError(
            f"event {event.value!r} is not legal in state {course.state.value!r}",
            course_id=course.course_id,
            state=course.state.value,
            event=event.value,
        )
    return course.with_state(successor)
