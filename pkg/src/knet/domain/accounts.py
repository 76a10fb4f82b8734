"""User accounts, roles, transcripts, terms, and guide eligibility."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from ..errors import ValidationError
from .grades import (
    LetterGrade,
    PASSING_LETTER,
    letter_rank,
    map_score_to_letter,
    normalize_course_title,
)


class Role(str, Enum):
    ADMIN = "admin"
    TEACHER = "teacher"
    GUIDE_STUDENT = "guide_student"
    GUIDE_ALUMNI = "guide_alumni"
    NOVICE = "novice"


GUIDE_ROLES = frozenset({Role.GUIDE_STUDENT, Role.GUIDE_ALUMNI})


@dataclass(frozen=True)
class ProfileInfo:
    university: str = ""
    faculty: str = ""
    department: str = ""
    teachable_courses: tuple[str, ...] = ()
    photo_ref: str | None = None


@dataclass(frozen=True)
class TranscriptEntry:
    """One prior course result. `numeric_grade` and `letter_grade` must
    agree under the band table."""

    course_title: str
    term_id: str
    letter_grade: LetterGrade
    numeric_grade: float

    def __post_init__(self) -> None:
        if map_score_to_letter(self.numeric_grade) is not self.letter_grade:
            raise ValidationError(
                f"letter {self.letter_grade.value} does not match score {self.numeric_grade}",
                course_title=self.course_title,
            )

    @property
    def title_key(self) -> str:
        return normalize_course_title(self.course_title)

    @property
    def passing(self) -> bool:
        return letter_rank(self.letter_grade) >= letter_rank(PASSING_LETTER)


@dataclass(frozen=True)
class Term:
    term_id: str
    label: str
    open: bool


@dataclass(frozen=True)
class UserAccount:
    user_id: str
    display_name: str
    password_digest: str
    roles: frozenset[Role] = frozenset()
    profile: ProfileInfo = field(default_factory=ProfileInfo)
    transcript: tuple[TranscriptEntry, ...] = ()

    def __post_init__(self) -> None:
        if GUIDE_ROLES <= self.roles:
            raise ValidationError(
                "guide_student and guide_alumni are mutually exclusive",
                user_id=self.user_id,
            )

    def has_role(self, role: Role) -> bool:
        return role in self.roles

    @property
    def is_guide(self) -> bool:
        return bool(self.roles & GUIDE_ROLES)

    def with_role(self, role: Role) -> "UserAccount":
        return replace(self, roles=self.roles | {role})

    def with_transcript_entry(self, entry: TranscriptEntry) -> "UserAccount":
        for existing in self.transcript:
            if existing.title_key == entry.title_key and existing.term_id == entry.term_id:
                raise ValidationError(
                    "transcript already has an entry for this course and term",
                    course_title=entry.course_title,
                    term_id=entry.term_id,
                )
        return replace(self, transcript=self.transcript + (entry,))


def is_guide_eligible(user: UserAccount, course_title: str) -> bool:
    """True iff `user` may mentor a course with this title: they hold a
    guide role and passed the course (>= CC) at some point."""
    if not user.is_guide:
        return False
    key = normalize_course_title(course_title)
    return any(entry.title_key == key and entry.passing for entry in user.transcript)
