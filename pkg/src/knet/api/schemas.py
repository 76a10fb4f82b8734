"""Request and response documents for the HTTP facade."""

from __future__ import annotations

from datetime import date
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field


class RequestDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AttachmentDoc(RequestDoc):
    attachment_id: str
    filename: str
    media_type: str


class PriorCourse(RequestDoc):
    course_title: str
    numeric_grade: float | None = None
    letter_grade: str | None = None


class IntakeForm(RequestDoc):
    university: str = ""
    faculty: str = ""
    department: str = ""
    teachable_courses: list[str] = Field(default_factory=list)
    prior_courses: list[PriorCourse] = Field(default_factory=list)


class RegisterRequest(RequestDoc):
    display_name: str
    password: str
    role_intent: Literal["student", "alumni", "teacher"]
    intake: IntakeForm = Field(default_factory=IntakeForm)


class SessionRequest(RequestDoc):
    display_name: str
    password: str


class TeacherApplicationRequest(RequestDoc):
    university: str
    faculty: str
    department: str
    teachable_courses: list[str]


class ApprovalRequest(RequestDoc):
    target: Literal["teacher-application", "course-request"]
    target_id: str
    decision: Literal["approved", "denied"]
    reason: str | None = None


class CourseRequest(RequestDoc):
    title: str
    content: str = ""
    start_date: date
    end_date: date


class EnrollmentRequest(RequestDoc):
    novice_id: str | None = None


class InvitationRequest(RequestDoc):
    guide_ids: list[str]


class InvitationResponseRequest(RequestDoc):
    accept: bool


class GuideSelectionRequest(RequestDoc):
    invitation_id: str


class MaterialRequest(RequestDoc):
    attachment: AttachmentDoc
    caption: str | None = None


class AssignmentRequest(RequestDoc):
    title: str
    start_date: date
    deadline: date
    body: AttachmentDoc | None = None


class AssignmentPatch(RequestDoc):
    deadline: date


class DraftRequest(RequestDoc):
    attachments: list[AttachmentDoc]


class BodyRequest(RequestDoc):
    body: str


class EvaluationRequest(RequestDoc):
    verdict: Literal["approve", "revise"]
    comments: str = ""


class GradeRequest(RequestDoc):
    score: float


class DiscussionRequest(RequestDoc):
    topic: str
    body: str


class PhotoRequest(RequestDoc):
    attachment_id: str


class ClockRequest(RequestDoc):
    today: date


class UploadRequest(RequestDoc):
    filename: str
    media_type: str | None = None
    content_base64: str


# -- responses (documents produced by the service layer) ---------------------------


class UserDoc(BaseModel):
    user_id: str
    display_name: str
    roles: list[str]
    profile: dict[str, Any]
    transcript: list[dict[str, Any]]


class SessionDoc(BaseModel):
    token: str
    expires_at: str
    user: UserDoc


class CourseDoc(BaseModel):
    course_id: str
    title: str
    content: str
    teacher_id: str
    teacher_name: str
    term_id: str
    start_date: str
    end_date: str
    state: str
    enrolled_novices: list[str]
    denial_reason: str | None = None
    all_matched: bool
    counts: dict[str, int]


class InvitationDoc(BaseModel):
    invitation_id: str
    course_id: str
    novice_id: str
    guide_id: str
    status: str
    course_title: str | None = None
    novice_name: str | None = None
    guide_name: str | None = None


class MatchDoc(BaseModel):
    course_id: str
    novice_id: str
    guide_id: str
    invitation_id: str


class SelectionDoc(BaseModel):
    match: MatchDoc
    course: CourseDoc


class ApplicationDoc(BaseModel):
    application_id: str
    user_id: str
    university: str
    faculty: str
    department: str
    teachable_courses: list[str]
    status: str
    reason: str | None = None


class MaterialDoc(BaseModel):
    material_id: str
    course_id: str
    attachment: dict[str, str]
    caption: str | None = None
    published_seq: int


class AssignmentDoc(BaseModel):
    assignment_id: str
    course_id: str
    title: str
    body: dict[str, str] | None = None
    start_date: str
    deadline: str
    sequence_no: int
    active: bool


class SubmissionDoc(BaseModel):
    submission_id: str
    assignment_id: str
    course_id: str
    novice_id: str
    guide_id: str
    state: str
    attachments: list[dict[str, str]]
    feedback_thread: list[dict[str, Any]]
    guide_evaluation: dict[str, str] | None = None
    teacher_grade: float | None = None


class ActivationDoc(BaseModel):
    assignment: AssignmentDoc
    submissions: list[SubmissionDoc]


class FeedbackDoc(BaseModel):
    author_id: str
    body: str
    sent_at: int


class GradeRowDoc(BaseModel):
    novice_id: str
    per_assignment_grades: dict[str, float | None]
    average: float | None = None


class ClosureDoc(BaseModel):
    course: CourseDoc
    final_grades: list[dict[str, Any]]


class PortfolioEntryDoc(BaseModel):
    entry_id: str
    owner_id: str
    course_id: str
    course_title: str
    assignment_title: str
    final_attachments: list[dict[str, str]]
    teacher_grade: float
    term_id: str
    graded_seq: int


class AnnouncementDoc(BaseModel):
    announcement_id: str
    course_id: str
    author_id: str
    body: str
    posted_seq: int


class QuestionDoc(BaseModel):
    question_id: str
    course_id: str
    novice_id: str
    body: str
    answer: str | None = None
    asked_seq: int
    answered_seq: int | None = None


class DiscussionDoc(BaseModel):
    discussion_id: str
    course_id: str
    author_id: str
    topic: str
    body: str
    opened_seq: int
    replies: list[dict[str, Any]]


class RosterEntryDoc(BaseModel):
    user_id: str
    display_name: str
    course_role: str
    guide_id: str | None = None


class CandidateDoc(BaseModel):
    user_id: str
    display_name: str


class InvitationInboxDoc(BaseModel):
    received: list[InvitationDoc]
    sent: list[InvitationDoc]


class ApprovalQueueDoc(BaseModel):
    teacher_applications: list[ApplicationDoc]
    course_requests: list[CourseDoc]


class TermDoc(BaseModel):
    term_id: str
    label: str
    open: bool


class TermsDoc(BaseModel):
    open_term_id: str | None = None
    terms: list[TermDoc]


class RolloverDoc(BaseModel):
    closed_term_id: str
    open_term: TermDoc


class UploadDoc(BaseModel):
    attachment_id: str
    filename: str
    media_type: str


class ClockDoc(BaseModel):
    today: str


class HealthDoc(BaseModel):
    status: str
    head_seq: int
    today: str


class JournalHeadDoc(BaseModel):
    head_seq: int
