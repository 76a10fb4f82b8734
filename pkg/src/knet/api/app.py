"""FastAPI application: routes, sessions, and the error envelope.

Every mutating route funnels through the matrix check and then a single
service command, so a successful call journals exactly one event and a
failed one journals none. Errors of any depth surface as
`{"error": {"code", "message"}}` with a status class that keeps
authentication (401) and authorization (403) distinguishable.
"""

from __future__ import annotations

import base64
import binascii
from pathlib import Path
from typing import Any

from fastapi import Depends, FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from starlette.exceptions import HTTPException as StarletteHTTPException

from ..errors import (
    AuthenticationError,
    CapacityError,
    ConflictError,
    EligibilityError,
    KnetError,
    NotFoundError,
    PermissionDeniedError,
    SchemaError,
    StateError,
    ValidationError,
)
from ..service import NetworkService
from . import schemas
from .authz import matrix_doc, require
from .sessions import SessionStore

_STATUS_RULES: tuple[tuple[type[KnetError], int], ...] = (
    (AuthenticationError, 401),
    (PermissionDeniedError, 403),
    (NotFoundError, 404),
    (CapacityError, 409),
    (ConflictError, 409),
    (StateError, 409),
    (EligibilityError, 422),
    (ValidationError, 400),
    (SchemaError, 400),
)


def status_for(error: KnetError) -> int:
    for cls, status in _STATUS_RULES:
        if isinstance(error, cls):
            return status
    return 500


def error_response(error: KnetError) -> JSONResponse:
    return JSONResponse(status_code=status_for(error), content={"error": error.to_doc()})


def create_app(
    service: NetworkService,
    sessions: SessionStore | None = None,
    static_dir: Path | str | None = None,
) -> FastAPI:
    sessions = sessions or SessionStore()
    app = FastAPI(title="knet", version="0.1.0", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.state.service = service
    app.state.sessions = sessions

    @app.exception_handler(KnetError)
    async def _knet_error(_request: Request, exc: KnetError) -> JSONResponse:
        return error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def _request_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        detail = "; ".join(
            f"{'.'.join(str(loc) for loc in err.get('loc', ()))}: {err.get('msg', 'invalid')}"
            for err in exc.errors()[:5]
        )
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "validation_error", "message": detail or "invalid request"}},
        )

    def current_user(request: Request) -> dict[str, Any]:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise AuthenticationError("missing bearer token")
        token = header[7:].strip()
        user_id = sessions.resolve(token)
        return service.user_doc(user_id)

    def roles_of(user: dict[str, Any]) -> frozenset[str]:
        return frozenset(user["roles"])

    # -- accounts and sessions ------------------------------------------------------

    @app.post("/api/users", response_model=schemas.UserDoc, status_code=201)
    def register(body: schemas.RegisterRequest) -> Any:
        return service.register(
            body.display_name,
            body.password,
            body.role_intent,
            body.intake.model_dump(),
        )

    @app.post("/api/sessions", response_model=schemas.SessionDoc, status_code=201)
    def login(body: schemas.SessionRequest) -> Any:
        user = service.authenticate(body.display_name, body.password)
        session = sessions.create(user["user_id"])
        return {
            "token": session.token,
            "expires_at": session.expires_at.isoformat(),
            "user": user,
        }

    @app.delete("/api/sessions/current", status_code=204)
    def logout(request: Request, user: dict = Depends(current_user)) -> Response:
        token = request.headers["authorization"][7:].strip()
        sessions.revoke(token)
        return Response(status_code=204)

    @app.get("/api/users/me", response_model=schemas.UserDoc)
    def whoami(user: dict = Depends(current_user)) -> Any:
        return user

    @app.get("/api/users", response_model=list[schemas.UserDoc])
    def list_users(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_users")
        return service.list_users(user["user_id"])

    @app.get("/api/users/{user_id}", response_model=schemas.UserDoc)
    def get_user(user_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_users")
        return service.user_doc(user_id)

    @app.post("/api/users/{user_id}/photo", response_model=schemas.UserDoc)
    def set_photo(user_id: str, body: schemas.PhotoRequest, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "set_photo")
        return service.set_photo(user["user_id"], user_id, body.attachment_id)

    @app.get("/api/users/{user_id}/portfolio", response_model=list[schemas.PortfolioEntryDoc])
    def portfolio(user_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_portfolio")
        return service.query("portfolio", {"viewer_id": user["user_id"], "owner_id": user_id})

    @app.get("/api/users/{user_id}/invitations", response_model=schemas.InvitationInboxDoc)
    def invitations(user_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_invitations")
        if user_id != user["user_id"] and "admin" not in user["roles"]:
            raise PermissionDeniedError("invitations are private to their recipient")
        return service.list_invitations_for(user_id)

    # -- teacher applications and admin approvals -------------------------------------

    @app.post("/api/teacher-applications", response_model=schemas.ApplicationDoc, status_code=201)
    def apply_for_teacher(
        body: schemas.TeacherApplicationRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "apply_for_teacher")
        return service.apply_for_teacher(
            user["user_id"], body.university, body.faculty, body.department, body.teachable_courses
        )

    @app.get("/api/admin/approvals", response_model=schemas.ApprovalQueueDoc)
    def approval_queue(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_approvals")
        return service.pending_approvals(user["user_id"])

    @app.post("/api/admin/approvals")
    def decide(body: schemas.ApprovalRequest, user: dict = Depends(current_user)) -> Any:
        if body.target == "teacher-application":
            require(roles_of(user), "approve_teacher")
            return service.decide_application(
                user["user_id"], body.target_id, body.decision, body.reason
            )
        require(roles_of(user), "approve_course")
        return service.decide_course(user["user_id"], body.target_id, body.decision, body.reason)

    @app.post("/api/admin/term-rollovers", response_model=schemas.RolloverDoc, status_code=201)
    def rollover(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "rollover_term")
        return service.rollover_term(user["user_id"])

    @app.post("/api/admin/clock", response_model=schemas.ClockDoc)
    def set_clock(body: schemas.ClockRequest, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "set_clock")
        return service.set_sim_date(body.today, user["user_id"])

    @app.get("/api/admin/journal-head", response_model=schemas.JournalHeadDoc)
    def journal_head(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_journal")
        return {"head_seq": service.head_seq}

    @app.get("/api/terms", response_model=schemas.TermsDoc)
    def terms(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_terms")
        return service.terms_doc()

    # -- courses -----------------------------------------------------------------------

    @app.post("/api/courses", response_model=schemas.CourseDoc, status_code=201)
    def request_course(body: schemas.CourseRequest, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "request_course")
        return service.request_course(
            user["user_id"], body.title, body.content, body.start_date, body.end_date
        )

    @app.get("/api/courses", response_model=list[schemas.CourseDoc])
    def list_courses(user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_courses")
        return service.list_courses(user["user_id"])

    @app.get("/api/courses/{course_id}", response_model=schemas.CourseDoc)
    def get_course(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_course")
        doc = service.course_doc(course_id)
        if doc["state"] == "requested" and user["user_id"] != doc["teacher_id"]:
            if "admin" not in user["roles"]:
                raise NotFoundError(f"no such course {course_id!r}", course_id=course_id)
        return doc

    @app.post("/api/courses/{course_id}/enrollment-opening", response_model=schemas.CourseDoc)
    def open_enrollment(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "open_enrollment")
        return service.open_enrollment(user["user_id"], course_id)

    @app.post("/api/courses/{course_id}/enrollments", response_model=schemas.CourseDoc, status_code=201)
    def enroll(
        course_id: str,
        user: dict = Depends(current_user),
        body: schemas.EnrollmentRequest | None = None,
    ) -> Any:
        require(roles_of(user), "enroll")
        novice_id = body.novice_id if body is not None and body.novice_id else None
        return service.enroll(user["user_id"], course_id, novice_id)

    @app.delete("/api/courses/{course_id}/enrollments/{novice_id}", response_model=schemas.CourseDoc)
    def drop(course_id: str, novice_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "drop_novice")
        return service.drop_novice(user["user_id"], course_id, novice_id)

    @app.get("/api/courses/{course_id}/roster", response_model=list[schemas.RosterEntryDoc])
    def roster(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_roster")
        return service.query(
            "course_roster", {"viewer_id": user["user_id"], "course_id": course_id}
        )

    @app.get("/api/courses/{course_id}/guide-candidates", response_model=list[schemas.CandidateDoc])
    def guide_candidates(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_candidates")
        return service.query(
            "candidate_guides", {"viewer_id": user["user_id"], "course_id": course_id}
        )

    @app.post(
        "/api/courses/{course_id}/invitations",
        response_model=list[schemas.InvitationDoc],
        status_code=201,
    )
    def send_invitations(
        course_id: str, body: schemas.InvitationRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "send_invitations")
        return service.send_invitations(user["user_id"], course_id, body.guide_ids)

    @app.post("/api/invitations/{invitation_id}/response", response_model=schemas.InvitationDoc)
    def respond_invitation(
        invitation_id: str, body: schemas.InvitationResponseRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "respond_invitation")
        return service.respond_invitation(user["user_id"], invitation_id, body.accept)

    @app.post("/api/courses/{course_id}/guide-selection", response_model=schemas.SelectionDoc, status_code=201)
    def select_guide(
        course_id: str, body: schemas.GuideSelectionRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "select_guide")
        return service.select_guide(user["user_id"], course_id, body.invitation_id)

    # -- materials and assignments ------------------------------------------------------

    @app.post("/api/courses/{course_id}/materials", response_model=schemas.MaterialDoc, status_code=201)
    def publish_material(
        course_id: str, body: schemas.MaterialRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "publish_material")
        return service.publish_material(
            user["user_id"], course_id, body.attachment.model_dump(), body.caption
        )

    @app.get("/api/courses/{course_id}/materials", response_model=list[schemas.MaterialDoc])
    def list_materials(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_materials")
        return service.query("materials", {"viewer_id": user["user_id"], "course_id": course_id})

    @app.post("/api/courses/{course_id}/assignments", response_model=schemas.AssignmentDoc, status_code=201)
    def create_assignment(
        course_id: str, body: schemas.AssignmentRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "create_assignment")
        return service.create_assignment(
            user["user_id"],
            course_id,
            body.title,
            body.start_date,
            body.deadline,
            body.body.model_dump() if body.body is not None else None,
        )

    @app.get("/api/courses/{course_id}/assignments", response_model=list[schemas.AssignmentDoc])
    def list_assignments(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_assignments")
        return service.list_assignments(user["user_id"], course_id)

    @app.post("/api/assignments/{assignment_id}/activation", response_model=schemas.ActivationDoc)
    def activate_assignment(assignment_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "activate_assignment")
        return service.activate_assignment(user["user_id"], assignment_id)

    @app.patch("/api/assignments/{assignment_id}", response_model=schemas.AssignmentDoc)
    def edit_assignment(
        assignment_id: str, body: schemas.AssignmentPatch, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "edit_assignment")
        return service.edit_assignment(user["user_id"], assignment_id, body.deadline)

    @app.get("/api/assignments/{assignment_id}/submissions", response_model=list[schemas.SubmissionDoc])
    def list_submissions(assignment_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_submissions")
        return service.list_submissions(user["user_id"], assignment_id)

    # -- the submission pipeline ----------------------------------------------------------

    @app.get("/api/submissions/{submission_id}", response_model=schemas.SubmissionDoc)
    def get_submission(submission_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_submissions")
        return service.view_submission(user["user_id"], submission_id)

    @app.post("/api/submissions/{submission_id}/drafts", response_model=schemas.SubmissionDoc, status_code=201)
    def submit_draft(
        submission_id: str, body: schemas.DraftRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "submit_work")
        return service.submit_work(
            user["user_id"], submission_id, [a.model_dump() for a in body.attachments]
        )

    @app.post("/api/submissions/{submission_id}/feedback", response_model=schemas.FeedbackDoc, status_code=201)
    def post_feedback(
        submission_id: str, body: schemas.BodyRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "post_feedback")
        return service.post_feedback(user["user_id"], submission_id, body.body)

    @app.post("/api/submissions/{submission_id}/guide-evaluation", response_model=schemas.SubmissionDoc)
    def guide_evaluate(
        submission_id: str, body: schemas.EvaluationRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "guide_evaluate")
        return service.guide_evaluate(user["user_id"], submission_id, body.verdict, body.comments)

    @app.post("/api/submissions/{submission_id}/teacher-grade", response_model=schemas.SubmissionDoc)
    def teacher_grade(
        submission_id: str, body: schemas.GradeRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "teacher_grade")
        return service.teacher_grade(user["user_id"], submission_id, body.score)

    @app.post("/api/submissions/{submission_id}/void", response_model=schemas.SubmissionDoc)
    def void_submission(submission_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "void_submission")
        return service.void_submission(user["user_id"], submission_id)

    # -- grades, closing, community --------------------------------------------------------

    @app.get("/api/courses/{course_id}/grades", response_model=list[schemas.GradeRowDoc])
    def grades(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_grades")
        return service.query("grade_book", {"viewer_id": user["user_id"], "course_id": course_id})

    @app.post("/api/courses/{course_id}/closure", response_model=schemas.ClosureDoc)
    def close_course(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "close_course")
        return service.close_course(user["user_id"], course_id)

    @app.post("/api/courses/{course_id}/announcements", response_model=schemas.AnnouncementDoc, status_code=201)
    def post_announcement(
        course_id: str, body: schemas.BodyRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "post_announcement")
        return service.post_announcement(user["user_id"], course_id, body.body)

    @app.get("/api/courses/{course_id}/announcements", response_model=list[schemas.AnnouncementDoc])
    def list_announcements(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_announcements")
        return service.list_announcements(user["user_id"], course_id)

    @app.post("/api/courses/{course_id}/questions", response_model=schemas.QuestionDoc, status_code=201)
    def ask_teacher(
        course_id: str, body: schemas.BodyRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "ask_teacher")
        return service.ask_teacher(user["user_id"], course_id, body.body)

    @app.get("/api/courses/{course_id}/questions", response_model=list[schemas.QuestionDoc])
    def list_questions(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_questions")
        return service.list_questions(user["user_id"], course_id)

    @app.post("/api/questions/{question_id}/answer", response_model=schemas.QuestionDoc)
    def answer_question(
        question_id: str, body: schemas.BodyRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "answer_question")
        return service.answer_question(user["user_id"], question_id, body.body)

    @app.post("/api/courses/{course_id}/discussions", response_model=schemas.DiscussionDoc, status_code=201)
    def open_discussion(
        course_id: str, body: schemas.DiscussionRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "open_discussion")
        return service.open_discussion(user["user_id"], course_id, body.topic, body.body)

    @app.get("/api/courses/{course_id}/discussions", response_model=list[schemas.DiscussionDoc])
    def list_discussions(course_id: str, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "view_discussions")
        return service.list_discussions(user["user_id"], course_id)

    @app.post("/api/discussions/{discussion_id}/replies", response_model=schemas.DiscussionDoc, status_code=201)
    def reply_discussion(
        discussion_id: str, body: schemas.BodyRequest, user: dict = Depends(current_user)
    ) -> Any:
        require(roles_of(user), "reply_discussion")
        return service.reply_discussion(user["user_id"], discussion_id, body.body)

    # -- attachments, meta, health ----------------------------------------------------------

    @app.post("/api/attachments", response_model=schemas.UploadDoc, status_code=201)
    def upload(body: schemas.UploadRequest, user: dict = Depends(current_user)) -> Any:
        require(roles_of(user), "upload_attachment")
        try:
            content = base64.b64decode(body.content_base64, validate=True)
        except (binascii.Error, ValueError):
            raise ValidationError("content_base64 is not valid base64")
        return service.attachments.put(content, body.filename, body.media_type)

    @app.get("/api/attachments/{attachment_id}")
    def download(attachment_id: str, user: dict = Depends(current_user)) -> Response:
        require(roles_of(user), "view_materials")
        content = service.attachments.get(attachment_id)
        return Response(content=content, media_type="application/octet-stream")

    @app.get("/api/meta/authorization")
    def authorization_matrix(user: dict = Depends(current_user)) -> Any:
        return matrix_doc()

    @app.get("/api/healthz", response_model=schemas.HealthDoc)
    def healthz() -> Any:
        return {
            "status": "ok",
            "head_seq": service.head_seq,
            "today": service.today().isoformat(),
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", _SpaFiles(directory=str(static_dir), html=True), name="ui")

    return app


class _SpaFiles(StaticFiles):
    """Static files with a single-page fallback: unknown paths get
    index.html so client-side routes survive a browser reload."""

    async def get_response(self, path: str, scope):  # type: ignore[override]
        try:
            response = await super().get_response(path, scope)
        except StarletteHTTPException as exc:
            if exc.status_code != 404 or path.startswith("api/"):
                raise
            return await super().get_response("index.html", scope)
        if response.status_code == 404 and not path.startswith("api/"):
            return await super().get_response("index.html", scope)
        return response
