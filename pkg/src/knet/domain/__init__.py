"""Pure domain model: no I/O, no clocks, no storage.

Grade scale and course-title normalization live in `grades`, accounts
and guide eligibility in `accounts`, the course lifecycle machine in
`lifecycle`.
"""

from .accounts import (
    GUIDE_ROLES,
    ProfileInfo,
    Role,
    Term,
    TranscriptEntry,
    UserAccount,
    is_guide_eligible,
)
from .grades import (
    GRADE_BANDS,
    LETTER_ORDER,
    PASSING_LETTER,
    LetterGrade,
    letter_lower_bound,
    letter_rank,
    map_score_to_letter,
    normalize_course_title,
)
from .lifecycle import (
    Course,
    CourseState,
    LifecycleEvent,
    TRANSITIONS,
    transition_course,
)

__all__ = [
    "Course",
    "CourseState",
    "GRADE_BANDS",
    "GUIDE_ROLES",
    "LETTER_ORDER",
    "LetterGrade",
    "LifecycleEvent",
    "PASSING_LETTER",
    "ProfileInfo",
    "Role",
    "TRANSITIONS",
    "Term",
    "TranscriptEntry",
    "UserAccount",
    "is_guide_eligible",
    "letter_lower_bound",
    "letter_rank",
    "map_score_to_letter",
    "normalize_course_title",
    "transition_course",
]
