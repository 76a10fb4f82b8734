"""Assignments, submissions, grading, portfolios, and course community.

The submission pipeline runs Drafting -> AwaitingGuide -> (Drafting |
ForwardedToTeacher) -> Graded: the guide evaluates first and either
approves (auto-forwarding to the teacher) or sends the work back for
revision. Grades land in the grade book and the novice's portfolio;
closing the course turns grade-book averages into transcript entries.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import date
from enum import Enum
from typing import TYPE_CHECKING, Any

from .domain import LetterGrade, Role, TranscriptEntry, map_score_to_letter
from .domain.lifecycle import Course, CourseState, LifecycleEvent, transition_course
from .errors import (
    CompletenessError,
    DeadlineError,
    GatingError,
    NotFoundError,
    PermissionDeniedError,
    StateError,
    ValidationError,
)
from .events import applier
from .matching import find_match, is_participant, require_course
from .registration import require_user

if TYPE_CHECKING:
    from .state import NetworkState


@dataclass(frozen=True)
class AttachmentRef:
    attachment_id: str
    filename: str
    media_type: str


def attachment_from_doc(doc: Any) -> AttachmentRef:
    if not isinstance(doc, dict):
        raise ValidationError("attachment reference must be an object")
    try:
        ref = AttachmentRef(
            attachment_id=str(doc["attachment_id"]),
            filename=str(doc["filename"]),
            media_type=str(doc["media_type"]),
        )
    except KeyError as exc:
        raise ValidationError(f"attachment reference is missing {exc.args[0]!r}")
    if not ref.attachment_id:
        raise ValidationError("attachment id must not be empty")
    return ref


@dataclass(frozen=True)
class Material:
    material_id: str
    course_id: str
    attachment: AttachmentRef
    caption: str | None
    published_seq: int


@dataclass(frozen=True)
class Assignment:
    assignment_id: str
    course_id: str
    title: str
    body: AttachmentRef | None
    start_date: date
    deadline: date
    sequence_no: int
    active: bool = False


class SubmissionState(str, Enum):
    DRAFTING = "drafting"
    AWAITING_GUIDE = "awaiting_guide"
    GUIDE_EVALUATED = "guide_evaluated"
    FORWARDED = "forwarded_to_teacher"
    GRADED = "graded"
    VOIDED = "voided"


class Verdict(str, Enum):
    APPROVE = "approve"
    REVISE = "revise"


@dataclass(frozen=True)
class Evaluation:
    verdict: Verdict
    comments: str


@dataclass(frozen=True)
class FeedbackMessage:
    author_id: str
    body: str
    sent_at: int  # journal sequence number of the posting event


@dataclass(frozen=True)
class Submission:
    submission_id: str
    assignment_id: str
    course_id: str
    novice_id: str
    guide_id: str
    state: SubmissionState = SubmissionState.DRAFTING
    attachments: tuple[AttachmentRef, ...] = ()
    feedback_thread: tuple[FeedbackMessage, ...] = ()
    guide_evaluation: Evaluation | None = None
    teacher_grade: float | None = None


@dataclass(frozen=True)
class PortfolioEntry:
    entry_id: str
    owner_id: str
    course_id: str
    course_title: str
    assignment_title: str
    final_attachments: tuple[AttachmentRef, ...]
    teacher_grade: float
    term_id: str
    graded_seq: int


@dataclass(frozen=True)
class Announcement:
    announcement_id: str
    course_id: str
    author_id: str
    body: str
    posted_seq: int


@dataclass(frozen=True)
class Question:
    question_id: str
    course_id: str
    novice_id: str
    body: str
    answer: str | None = None
    asked_seq: int = 0
    answered_seq: int | None = None


@dataclass(frozen=True)
class DiscussionReply:
    author_id: str
    body: str
    sent_at: int


@dataclass(frozen=True)
class DiscussionThread:
    discussion_id: str
    course_id: str
    author_id: str
    topic: str
    body: str
    opened_seq: int
    replies: tuple[DiscussionReply, ...] = ()


@dataclass(frozen=True)
class GradeBookRow:
    novice_id: str
    per_assignment_grades: dict[str, float | None]
    average: float | None


def require_assignment(state: "NetworkState", assignment_id: str) -> Assignment:
    assignment = state.assignments.get(assignment_id)
    if assignment is None:
        raise NotFoundError(f"no such assignment {assignment_id!r}", assignment_id=assignment_id)
    return assignment


def require_submission(state: "NetworkState", submission_id: str) -> Submission:
    submission = state.submissions.get(submission_id)
    if submission is None:
        raise NotFoundError(f"no such submission {submission_id!r}", submission_id=submission_id)
    return submission


def _require_teacher_of(state: "NetworkState", actor_id: str, course: Course, action: str) -> None:
    if actor_id != course.teacher_id:
        raise PermissionDeniedError(
            f"only the course teacher may {action}", course_id=course.course_id
        )


def _require_active(course: Course, action: str) -> None:
    if course.state is not CourseState.ACTIVE:
        raise GatingError(
            f"cannot {action}: course {course.course_id} is {course.state.value}, not active",
            course_id=course.course_id,
        )


def course_assignments(state: "NetworkState", course_id: str) -> list[Assignment]:
    rows = [a for a in state.assignments.values() if a.course_id == course_id]
    rows.sort(key=lambda a: a.sequence_no)
    return rows


def course_submissions(state: "NetworkState", course_id: str) -> list[Submission]:
    return [s for s in state.submissions.values() if s.course_id == course_id]


# -- materials ---------------------------------------------------------------------


def validate_publish_material(
    state: "NetworkState",
    actor_id: str,
    course_id: str,
    attachment: dict[str, Any],
    caption: str | None,
) -> dict[str, Any]:
    course = require_course(state, course_id)
    _require_teacher_of(state, actor_id, course, "publish materials")
    _require_active(course, "publish materials")
    ref = attachment_from_doc(attachment)
    payload: dict[str, Any] = {
        "material_id": state.next_id("mat"),
        "course_id": course_id,
        "attachment": {
            "attachment_id": ref.attachment_id,
            "filename": ref.filename,
            "media_type": ref.media_type,
        },
    }
    if caption:
        payload["caption"] = caption
    return payload


@applier("material_published")
def _apply_material(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    material = Material(
        material_id=payload["material_id"],
        course_id=payload["course_id"],
        attachment=attachment_from_doc(payload["attachment"]),
        caption=payload.get("caption"),
        published_seq=seq,
    )
    state.materials[material.material_id] = material
    state.take_id("mat")


def list_materials(state: "NetworkState", viewer_id: str, course_id: str) -> list[Material]:
    """Materials are part of the running course: nobody but the teacher
    (or an administrator) sees them before the course is Active."""
    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    rows = [m for m in state.materials.values() if m.course_id == course_id]
    rows.sort(key=lambda m: m.published_seq)
    if viewer_id == course.teacher_id or viewer.has_role(Role.ADMIN):
        return rows
    if not is_participant(state, course, viewer_id):
        raise PermissionDeniedError(
            "course materials are restricted to participants", course_id=course_id
        )
    if course.state not in (CourseState.ACTIVE, CourseState.CLOSED):
        raise GatingError(
            f"materials are not visible until the course is active; "
            f"course {course_id} is {course.state.value}",
            course_id=course_id,
        )
    return rows


# -- assignments -------------------------------------------------------------------


def validate_create_assignment(
    state: "NetworkState",
    actor_id: str,
    course_id: str,
    title: str,
    start_date: date,
    deadline: date,
    body: dict[str, Any] | None,
) -> dict[str, Any]:
    course = require_course(state, course_id)
    _require_teacher_of(state, actor_id, course, "create assignments")
    _require_active(course, "create assignments")
    if not title or not title.strip():
        raise ValidationError("assignment title must not be empty")
    if deadline < start_date:
        raise ValidationError(
            f"deadline {deadline.isoformat()} is before start {start_date.isoformat()}"
        )
    sequence_no = len(course_assignments(state, course_id)) + 1
    payload: dict[str, Any] = {
        "assignment_id": state.next_id("a"),
        "course_id": course_id,
        "title": title,
        "start_date": start_date.isoformat(),
        "deadline": deadline.isoformat(),
        "sequence_no": sequence_no,
    }
    if body is not None:
        ref = attachment_from_doc(body)
        payload["body"] = {
            "attachment_id": ref.attachment_id,
            "filename": ref.filename,
            "media_type": ref.media_type,
        }
    return payload


@applier("assignment_created")
def _apply_assignment_created(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    body_doc = payload.get("body")
    assignment = Assignment(
        assignment_id=payload["assignment_id"],
        course_id=payload["course_id"],
        title=payload["title"],
        body=attachment_from_doc(body_doc) if body_doc is not None else None,
        start_date=date.fromisoformat(payload["start_date"]),
        deadline=date.fromisoformat(payload["deadline"]),
        sequence_no=payload["sequence_no"],
    )
    state.assignments[assignment.assignment_id] = assignment
    state.take_id("a")


def validate_activate_assignment(state: "NetworkState", actor_id: str, assignment_id: str) -> dict[str, Any]:
    assignment = require_assignment(state, assignment_id)
    course = require_course(state, assignment.course_id)
    _require_teacher_of(state, actor_id, course, "activate assignments")
    _require_active(course, "activate assignments")
    if assignment.active:
        raise StateError(f"assignment {assignment_id} is already active", assignment_id=assignment_id)
    submissions = []
    base = state.counters.get("s", 0)
    for offset, novice_id in enumerate(course.enrolled_novices, start=1):
        match = find_match(state, course.course_id, novice_id)
        if match is None:  # unreachable while the course is Active
            continue
        submissions.append(
            {
                "submission_id": f"s-{base + offset}",
                "novice_id": novice_id,
                "guide_id": match.guide_id,
            }
        )
    return {"assignment_id": assignment_id, "submissions": submissions}


@applier("assignment_activated")
def _apply_assignment_activated(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    assignment = state.assignments[payload["assignment_id"]]
    state.assignments[assignment.assignment_id] = replace(assignment, active=True)
    for doc in payload["submissions"]:
        submission = Submission(
            submission_id=doc["submission_id"],
            assignment_id=assignment.assignment_id,
            course_id=assignment.course_id,
            novice_id=doc["novice_id"],
            guide_id=doc["guide_id"],
        )
        state.submissions[submission.submission_id] = submission
        state.take_id("s")


def validate_edit_assignment(
    state: "NetworkState",
    actor_id: str,
    assignment_id: str,
    deadline: date,
) -> dict[str, Any]:
    assignment = require_assignment(state, assignment_id)
    course = require_course(state, assignment.course_id)
    _require_teacher_of(state, actor_id, course, "edit assignments")
    _require_active(course, "edit assignments")
    if not assignment.active:
        raise StateError(
            f"assignment {assignment_id} is not active; activate it before extending",
            assignment_id=assignment_id,
        )
    if deadline <= assignment.deadline:
        raise ValidationError(
            f"new deadline {deadline.isoformat()} does not extend "
            f"{assignment.deadline.isoformat()}"
        )
    return {"assignment_id": assignment_id, "deadline": deadline.isoformat()}


@applier("assignment_edited")
def _apply_assignment_edited(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    assignment = state.assignments[payload["assignment_id"]]
    state.assignments[assignment.assignment_id] = replace(
        assignment, deadline=date.fromisoformat(payload["deadline"])
    )


# -- the submission pipeline --------------------------------------------------------


def validate_submit_work(
    state: "NetworkState",
    actor_id: str,
    submission_id: str,
    attachments: list[dict[str, Any]],
    today: date,
) -> dict[str, Any]:
    submission = require_submission(state, submission_id)
    if actor_id != submission.novice_id:
        raise PermissionDeniedError(
            "only the owning novice may submit work", submission_id=submission_id
        )
    if submission.state is not SubmissionState.DRAFTING:
        raise StateError(
            f"submission {submission_id} is {submission.state.value}, not drafting",
            submission_id=submission_id,
        )
    assignment = require_assignment(state, submission.assignment_id)
    if not assignment.active:
        raise StateError(
            f"assignment {assignment.assignment_id} is not active",
            assignment_id=assignment.assignment_id,
        )
    if today > assignment.deadline:
        raise DeadlineError(
            f"deadline {assignment.deadline.isoformat()} has passed (today {today.isoformat()})",
            deadline=assignment.deadline.isoformat(),
        )
    if not attachments:
        raise ValidationError("a submission needs at least one attachment")
    refs = [attachment_from_doc(doc) for doc in attachments]
    return {
        "submission_id": submission_id,
        "attachments": [
            {"attachment_id": r.attachment_id, "filename": r.filename, "media_type": r.media_type}
            for r in refs
        ],
    }


@applier("work_submitted")
def _apply_work_submitted(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    submission = state.submissions[payload["submission_id"]]
    state.submissions[submission.submission_id] = replace(
        submission,
        state=SubmissionState.AWAITING_GUIDE,
        attachments=tuple(attachment_from_doc(doc) for doc in payload["attachments"]),
    )


def validate_post_feedback(
    state: "NetworkState", actor_id: str, submission_id: str, body: str
) -> dict[str, Any]:
    submission = require_submission(state, submission_id)
    if actor_id not in (submission.novice_id, submission.guide_id):
        raise PermissionDeniedError(
            "only the submission's novice or guide may post in the thread",
            submission_id=submission_id,
        )
    if submission.state in (SubmissionState.GRADED, SubmissionState.VOIDED):
        raise StateError(
            f"submission {submission_id} is {submission.state.value}; the thread is closed",
            submission_id=submission_id,
        )
    if not body or not body.strip():
        raise ValidationError("feedback body must not be empty")
    return {"submission_id": submission_id, "author_id": actor_id, "body": body}


@applier("feedback_posted")
def _apply_feedback(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    submission = state.submissions[payload["submission_id"]]
    message = FeedbackMessage(author_id=payload["author_id"], body=payload["body"], sent_at=seq)
    state.submissions[submission.submission_id] = replace(
        submission, feedback_thread=submission.feedback_thread + (message,)
    )


def validate_guide_evaluate(
    state: "NetworkState",
    actor_id: str,
    submission_id: str,
    verdict: str,
    comments: str,
) -> dict[str, Any]:
    submission = require_submission(state, submission_id)
    if actor_id != submission.guide_id:
        raise PermissionDeniedError(
            "only the matched guide may evaluate", submission_id=submission_id
        )
    if submission.state is not SubmissionState.AWAITING_GUIDE:
        raise StateError(
            f"submission {submission_id} is {submission.state.value}, not awaiting the guide",
            submission_id=submission_id,
        )
    try:
        parsed = Verdict(verdict)
    except ValueError:
        raise ValidationError(f"verdict must be 'approve' or 'revise', got {verdict!r}")
    return {"submission_id": submission_id, "verdict": parsed.value, "comments": comments}


@applier("submission_evaluated")
def _apply_evaluated(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    submission = state.submissions[payload["submission_id"]]
    verdict = Verdict(payload["verdict"])
    if verdict is Verdict.APPROVE:
        # Approved work is forwarded to the teacher in the same stroke.
        state.submissions[submission.submission_id] = replace(
            submission,
            state=SubmissionState.FORWARDED,
            guide_evaluation=Evaluation(verdict=verdict, comments=payload["comments"]),
        )
    else:
        # Revision: back to drafting, the guide's comments live on in the thread.
        message = FeedbackMessage(
            author_id=submission.guide_id, body=payload["comments"], sent_at=seq
        )
        state.submissions[submission.submission_id] = replace(
            submission,
            state=SubmissionState.DRAFTING,
            guide_evaluation=None,
            feedback_thread=submission.feedback_thread + (message,),
        )


def validate_teacher_grade(
    state: "NetworkState", actor_id: str, submission_id: str, score: Any
) -> dict[str, Any]:
    submission = require_submission(state, submission_id)
    course = require_course(state, submission.course_id)
    _require_teacher_of(state, actor_id, course, "grade submissions")
    if submission.state is not SubmissionState.FORWARDED:
        raise StateError(
            f"submission {submission_id} is {submission.state.value}, "
            "not forwarded by the guide",
            submission_id=submission_id,
        )
    if isinstance(score, bool) or not isinstance(score, (int, float)):
        raise ValidationError(f"score must be a number, got {score!r}")
    if not 0 <= score <= 100:
        raise ValidationError(f"score must be within [0, 100], got {score!r}")
    return {
        "submission_id": submission_id,
        "score": float(score),
        "portfolio_entry_id": state.next_id("p"),
    }


@applier("submission_graded")
def _apply_graded(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    submission = state.submissions[payload["submission_id"]]
    score = payload["score"]
    state.submissions[submission.submission_id] = replace(
        submission, state=SubmissionState.GRADED, teacher_grade=score
    )
    assignment = state.assignments[submission.assignment_id]
    course = state.courses[submission.course_id]
    entry = PortfolioEntry(
        entry_id=payload["portfolio_entry_id"],
        owner_id=submission.novice_id,
        course_id=course.course_id,
        course_title=course.title,
        assignment_title=assignment.title,
        final_attachments=submission.attachments,
        teacher_grade=score,
        term_id=course.term_id,
        graded_seq=seq,
    )
    state.portfolio[entry.entry_id] = entry
    state.take_id("p")


def validate_void_submission(state: "NetworkState", actor_id: str, submission_id: str) -> dict[str, Any]:
    submission = require_submission(state, submission_id)
    course = require_course(state, submission.course_id)
    _require_teacher_of(state, actor_id, course, "void submissions")
    if submission.state in (SubmissionState.GRADED, SubmissionState.VOIDED):
        raise StateError(
            f"submission {submission_id} is already {submission.state.value}",
            submission_id=submission_id,
        )
    return {"submission_id": submission_id}


@applier("submission_voided")
def _apply_voided(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    submission = state.submissions[payload["submission_id"]]
    state.submissions[submission.submission_id] = replace(
        submission, state=SubmissionState.VOIDED
    )


# -- grade book and closing ----------------------------------------------------------


def grade_book(state: "NetworkState", viewer_id: str, course_id: str) -> list[GradeBookRow]:
    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    if course.state not in (CourseState.ACTIVE, CourseState.CLOSED):
        raise GatingError(
            f"the grade book opens with the course; {course_id} is {course.state.value}",
            course_id=course_id,
        )
    if not (viewer.has_role(Role.ADMIN) or is_participant(state, course, viewer_id)):
        raise PermissionDeniedError("the grade book is restricted to participants", course_id=course_id)

    assignments = course_assignments(state, course_id)
    by_owner: dict[tuple[str, str], Submission] = {
        (s.novice_id, s.assignment_id): s for s in course_submissions(state, course_id)
    }
    rows = []
    for novice_id in course.enrolled_novices:
        grades: dict[str, float | None] = {}
        for assignment in assignments:
            submission = by_owner.get((novice_id, assignment.assignment_id))
            grades[assignment.assignment_id] = (
                submission.teacher_grade
                if submission is not None and submission.state is SubmissionState.GRADED
                else None
            )
        present = [g for g in grades.values() if g is not None]
        average = sum(present) / len(present) if present else None
        rows.append(GradeBookRow(novice_id=novice_id, per_assignment_grades=grades, average=average))
    return rows


def _final_grades(state: "NetworkState", course: Course) -> list[dict[str, Any]]:
    """Course grade per enrolled novice: the grade-book average, with no
    completed work counting as zero."""
    by_owner: dict[str, list[float]] = {n: [] for n in course.enrolled_novices}
    for submission in course_submissions(state, course.course_id):
        if submission.state is SubmissionState.GRADED and submission.novice_id in by_owner:
            by_owner[submission.novice_id].append(submission.teacher_grade)
    grades = []
    for novice_id in course.enrolled_novices:
        scores = by_owner[novice_id]
        numeric = sum(scores) / len(scores) if scores else 0.0
        grades.append(
            {
                "novice_id": novice_id,
                "numeric_grade": numeric,
                "letter_grade": map_score_to_letter(numeric).value,
            }
        )
    return grades


def validate_close_course(state: "NetworkState", actor_id: str, course_id: str) -> dict[str, Any]:
    course = require_course(state, course_id)
    _require_teacher_of(state, actor_id, course, "close the course")
    if course.state is not CourseState.ACTIVE:
        raise StateError(
            f"course {course_id} is {course.state.value}, not active", course_id=course_id
        )
    unresolved = sorted(
        s.submission_id
        for s in course_submissions(state, course_id)
        if s.state not in (SubmissionState.GRADED, SubmissionState.VOIDED)
    )
    if unresolved:
        raise CompletenessError(
            f"submissions not yet graded or voided: {', '.join(unresolved)}",
            submission_ids=unresolved,
        )
    transition_course(course, LifecycleEvent.CLOSE)
    return {"course_id": course_id, "final_grades": _final_grades(state, course)}


@applier("course_closed")
def _apply_course_closed(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    course = state.courses[payload["course_id"]]
    state.courses[course.course_id] = course.with_state(CourseState.CLOSED)
    for grade in payload["final_grades"]:
        user = state.users[grade["novice_id"]]
        entry = TranscriptEntry(
            course_title=course.title,
            term_id=course.term_id,
            letter_grade=LetterGrade(grade["letter_grade"]),
            numeric_grade=grade["numeric_grade"],
        )
        state.users[user.user_id] = user.with_transcript_entry(entry)


# -- portfolio ------------------------------------------------------------------------


def portfolio(state: "NetworkState", viewer_id: str, owner_id: str) -> list[PortfolioEntry]:
    require_user(state, viewer_id)
    require_user(state, owner_id)
    entries = [e for e in state.portfolio.values() if e.owner_id == owner_id]
    entries.sort(key=lambda e: e.graded_seq)
    return entries


# -- announcements, ask-the-teacher, discussions ---------------------------------------


def validate_post_announcement(
    state: "NetworkState", actor_id: str, course_id: str, body: str
) -> dict[str, Any]:
    course = require_course(state, course_id)
    _require_teacher_of(state, actor_id, course, "post announcements")
    if not body or not body.strip():
        raise ValidationError("announcement body must not be empty")
    return {"announcement_id": state.next_id("ann"), "course_id": course_id, "body": body}


@applier("announcement_posted")
def _apply_announcement(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    announcement = Announcement(
        announcement_id=payload["announcement_id"],
        course_id=payload["course_id"],
        author_id=actor_id,
        body=payload["body"],
        posted_seq=seq,
    )
    state.announcements[announcement.announcement_id] = announcement
    state.take_id("ann")


def validate_ask_teacher(
    state: "NetworkState", actor_id: str, course_id: str, body: str
) -> dict[str, Any]:
    course = require_course(state, course_id)
    if actor_id not in course.enrolled_novices:
        raise PermissionDeniedError(
            "only enrolled novices may ask the teacher", course_id=course_id
        )
    if not body or not body.strip():
        raise ValidationError("question must not be empty")
    return {
        "question_id": state.next_id("q"),
        "course_id": course_id,
        "novice_id": actor_id,
        "body": body,
    }


@applier("question_asked")
def _apply_question(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    question = Question(
        question_id=payload["question_id"],
        course_id=payload["course_id"],
        novice_id=payload["novice_id"],
        body=payload["body"],
        asked_seq=seq,
    )
    state.questions[question.question_id] = question
    state.take_id("q")


def validate_answer_question(
    state: "NetworkState", actor_id: str, question_id: str, body: str
) -> dict[str, Any]:
    question = state.questions.get(question_id)
    if question is None:
        raise NotFoundError(f"no such question {question_id!r}", question_id=question_id)
    course = require_course(state, question.course_id)
    _require_teacher_of(state, actor_id, course, "answer questions")
    if question.answer is not None:
        raise StateError(f"question {question_id} is already answered", question_id=question_id)
    if not body or not body.strip():
        raise ValidationError("answer must not be empty")
    return {"question_id": question_id, "body": body}


@applier("question_answered")
def _apply_answer(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    question = state.questions[payload["question_id"]]
    state.questions[question.question_id] = replace(
        question, answer=payload["body"], answered_seq=seq
    )


def validate_open_discussion(
    state: "NetworkState", actor_id: str, course_id: str, topic: str, body: str
) -> dict[str, Any]:
    course = require_course(state, course_id)
    if not is_participant(state, course, actor_id):
        raise PermissionDeniedError(
            "discussions are restricted to course participants", course_id=course_id
        )
    if not topic or not topic.strip():
        raise ValidationError("discussion topic must not be empty")
    if not body or not body.strip():
        raise ValidationError("discussion body must not be empty")
    return {
        "discussion_id": state.next_id("d"),
        "course_id": course_id,
        "author_id": actor_id,
        "topic": topic,
        "body": body,
    }


@applier("discussion_opened")
def _apply_discussion(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    thread = DiscussionThread(
        discussion_id=payload["discussion_id"],
        course_id=payload["course_id"],
        author_id=payload["author_id"],
        topic=payload["topic"],
        body=payload["body"],
        opened_seq=seq,
    )
    state.discussions[thread.discussion_id] = thread
    state.take_id("d")


def validate_reply_discussion(
    state: "NetworkState", actor_id: str, discussion_id: str, body: str
) -> dict[str, Any]:
    thread = state.discussions.get(discussion_id)
    if thread is None:
        raise NotFoundError(f"no such discussion {discussion_id!r}", discussion_id=discussion_id)
    course = require_course(state, thread.course_id)
    if not is_participant(state, course, actor_id):
        raise PermissionDeniedError(
            "discussions are restricted to course participants", course_id=course.course_id
        )
    if not body or not body.strip():
        raise ValidationError("reply must not be empty")
    return {"discussion_id": discussion_id, "author_id": actor_id, "body": body}


@applier("discussion_replied")
def _apply_reply(state: "NetworkState", seq: int, actor_id: str, payload: dict[str, Any]) -> None:
    thread = state.discussions[payload["discussion_id"]]
    reply = DiscussionReply(author_id=payload["author_id"], body=payload["body"], sent_at=seq)
    state.discussions[thread.discussion_id] = replace(thread, replies=thread.replies + (reply,))


# -- read-side helpers ------------------------------------------------------------------


def view_submission(state: "NetworkState", viewer_id: str, submission_id: str) -> Submission:
    submission = require_submission(state, submission_id)
    viewer = require_user(state, viewer_id)
    course = require_course(state, submission.course_id)
    allowed = (
        viewer_id in (submission.novice_id, submission.guide_id, course.teacher_id)
        or viewer.has_role(Role.ADMIN)
    )
    if not allowed:
        raise PermissionDeniedError(
            "the feedback thread is private to the pair and their teacher",
            submission_id=submission_id,
        )
    return submission


def course_announcements(state: "NetworkState", viewer_id: str, course_id: str) -> list[Announcement]:
    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    if not (viewer.has_role(Role.ADMIN) or is_participant(state, course, viewer_id)):
        raise PermissionDeniedError("announcements are restricted to participants", course_id=course_id)
    rows = [a for a in state.announcements.values() if a.course_id == course_id]
    rows.sort(key=lambda a: a.posted_seq)
    return rows


def course_questions(state: "NetworkState", viewer_id: str, course_id: str) -> list[Question]:
    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    if not (viewer.has_role(Role.ADMIN) or is_participant(state, course, viewer_id)):
        raise PermissionDeniedError("questions are restricted to participants", course_id=course_id)
    rows = [q for q in state.questions.values() if q.course_id == course_id]
    rows.sort(key=lambda q: q.asked_seq)
    return rows


def course_discussions(state: "NetworkState", viewer_id: str, course_id: str) -> list[DiscussionThread]:
    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    if not (viewer.has_role(Role.ADMIN) or is_participant(state, course, viewer_id)):
        raise PermissionDeniedError("discussions are restricted to participants", course_id=course_id)
    rows = [d for d in state.discussions.values() if d.course_id == course_id]
    rows.sort(key=lambda d: d.opened_seq, reverse=True)
    return rows
