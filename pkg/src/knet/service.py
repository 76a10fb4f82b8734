"""Application service: every command and query behind one lock.

A command validates against materialized state, appends exactly one
event (durably, before acknowledgment), folds it in, and returns a
plain-document result. Failures never touch the journal. Queries answer
from the same state under the same lock, so they always observe a
journal prefix.
"""

from __future__ import annotations

import copy
import hashlib
import hmac
import threading
from dataclasses import replace
from datetime import date
from pathlib import Path
from typing import Any

from . import coursework, matching, registration
from .attachments import AttachmentStore
from .canon import canonical_line, to_doc
from .clock import SimClock, WallClock
from .domain import Role
from .errors import (
    AuthenticationError,
    PermissionDeniedError,
    StateError,
    ValidationError,
)
from .matching import is_participant, require_course
from .registration import require_admin, require_user
from .state import NetworkState, Snapshot, apply_event, replay
from .store.journal import EventRecord, FileJournal, MemoryJournal
from .store.views import query as run_query

SNAPSHOT_FORMAT = "knet-snapshot"
SNAPSHOT_VERSION = 1
DEFAULT_KDF_ITERATIONS = 30_000
_SALT_TAG = b"knet.v1:"


def hash_password(display_name: str, password: str, iterations: int = DEFAULT_KDF_ITERATIONS) -> str:
    """Deterministic per-account digest (the salt derives from the
    display name) so that identical registrations journal identically."""
    salt = hashlib.sha256(_SALT_TAG + display_name.encode("utf-8")).digest()
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
    return f"pbkdf2_sha256${iterations}${digest.hex()}"


def verify_password(display_name: str, password: str, stored: str) -> bool:
    try:
        scheme, iterations, hexdigest = stored.split("$")
        if scheme != "pbkdf2_sha256":
            return False
        candidate = hash_password(display_name, password, int(iterations))
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(candidate.split("$")[2], hexdigest)


class NetworkService:
    def __init__(
        self,
        journal: FileJournal | MemoryJournal,
        clock: WallClock | SimClock | None = None,
        attachments: AttachmentStore | None = None,
        admin_name: str = "admin",
        admin_password: str = "admin",
        kdf_iterations: int = DEFAULT_KDF_ITERATIONS,
    ) -> None:
        self._journal = journal
        self._clock = clock or WallClock()
        self._attachments = attachments or AttachmentStore(None)
        self._kdf_iterations = kdf_iterations
        self._lock = threading.RLock()
        self._state: NetworkState = replay(journal.records()).state
        if journal.head_seq == 0:
            payload = registration.validate_bootstrap(
                admin_name, hash_password(admin_name, admin_password, kdf_iterations)
            )
            self._commit("system_bootstrapped", "system", payload)

    # -- construction ---------------------------------------------------------

    @classmethod
    def open_dir(
        cls,
        data_dir: Path | str,
        sim_date: date | None = None,
        admin_name: str = "admin",
        admin_password: str = "admin",
        kdf_iterations: int = DEFAULT_KDF_ITERATIONS,
    ) -> "NetworkService":
        data_dir = Path(data_dir)
        journal = FileJournal(data_dir / "journal")
        attachments = AttachmentStore(data_dir / "attachments")
        clock = SimClock(sim_date) if sim_date is not None else WallClock()
        return cls(
            journal,
            clock=clock,
            attachments=attachments,
            admin_name=admin_name,
            admin_password=admin_password,
            kdf_iterations=kdf_iterations,
        )

    @classmethod
    def in_memory(
        cls,
        sim_date: date | None = None,
        admin_name: str = "admin",
        admin_password: str = "admin",
        kdf_iterations: int = 1_000,
    ) -> "NetworkService":
        clock = SimClock(sim_date) if sim_date is not None else WallClock()
        return cls(
            MemoryJournal(),
            clock=clock,
            admin_name=admin_name,
            admin_password=admin_password,
            kdf_iterations=kdf_iterations,
        )

    def fork(self) -> "NetworkService":
        """Independent copy sharing nothing mutable; used by test
        harnesses to branch explorations without replaying."""
        with self._lock:
            twin = object.__new__(NetworkService)
            twin._journal = MemoryJournal.from_records(list(self._journal.records()))
            twin._clock = copy.deepcopy(self._clock)
            twin._attachments = self._attachments.fork()
            twin._kdf_iterations = self._kdf_iterations
            twin._lock = threading.RLock()
            twin._state = copy.deepcopy(self._state)
            return twin

    def close(self) -> None:
        self._journal.close()

    # -- plumbing ---------------------------------------------------------------

    def _commit(self, kind: str, actor_id: str, payload: dict[str, Any]) -> EventRecord:
        record = self._journal.append(
            timestamp=self._clock.now(), actor_id=actor_id, kind=kind, payload=payload
        )
        apply_event(self._state, record)
        return record

    @property
    def state(self) -> NetworkState:
        """Materialized state; read-only by convention (commands mutate)."""
        return self._state

    @property
    def attachments(self) -> AttachmentStore:
        return self._attachments

    @property
    def clock(self) -> WallClock | SimClock:
        return self._clock

    @property
    def head_seq(self) -> int:
        with self._lock:
            return self._journal.head_seq

    def records(self) -> list[EventRecord]:
        with self._lock:
            return list(self._journal.records())

    def snapshot(self) -> Snapshot:
        with self._lock:
            return Snapshot(
                as_of_seq=self._journal.head_seq, state=copy.deepcopy(self._state)
            )

    def write_snapshot(self, path: Path | str) -> Path:
        snapshot = self.snapshot()
        header = {
            "format": SNAPSHOT_FORMAT,
            "version": SNAPSHOT_VERSION,
            "as_of_seq": snapshot.as_of_seq,
        }
        path = Path(path)
        body = canonical_line(header) + snapshot.canonical_bytes() + b"\n"
        path.write_bytes(body)
        return path

    def today(self) -> date:
        return self._clock.today()

    def set_sim_date(self, day: date, actor_id: str) -> dict[str, Any]:
        with self._lock:
            require_admin(self._state, actor_id)
            if not isinstance(self._clock, SimClock):
                raise StateError("the service runs on the wall clock; no simulated date to set")
            self._clock.advance_to(day)
            return {"today": self._clock.today().isoformat()}

    # -- authentication -----------------------------------------------------------

    def authenticate(self, display_name: str, password: str) -> dict[str, Any]:
        with self._lock:
            user = registration.find_user_by_name(self._state, display_name)
            if user is None or not verify_password(display_name, password, user.password_digest):
                raise AuthenticationError("unknown account or wrong password")
            return self.user_doc(user.user_id)

    # -- commands: registration and approvals --------------------------------------

    def register(
        self,
        display_name: str,
        password: str,
        role_intent: str,
        intake: dict[str, Any] | None = None,
    ) -> dict[str, Any]:
        with self._lock:
            if not password:
                raise ValidationError("password must not be empty")
            digest = hash_password(display_name, password, self._kdf_iterations)
            payload = registration.validate_register(
                self._state, display_name, digest, role_intent, intake or {}
            )
            self._commit("user_registered", payload["user_id"], payload)
            return self.user_doc(payload["user_id"])

    def apply_for_teacher(
        self,
        actor_id: str,
        university: str,
        faculty: str,
        department: str,
        teachable_courses: list[str],
    ) -> dict[str, Any]:
        with self._lock:
            payload = registration.validate_apply_for_teacher(
                self._state, actor_id, university, faculty, department, teachable_courses
            )
            self._commit("teacher_application_submitted", actor_id, payload)
            return to_doc(self._state.applications[payload["application_id"]])

    def decide_application(
        self, actor_id: str, application_id: str, decision: str, reason: str | None = None
    ) -> dict[str, Any]:
        with self._lock:
            payload = registration.validate_decide_application(
                self._state, actor_id, application_id, decision, reason
            )
            self._commit("application_decided", actor_id, payload)
            return to_doc(self._state.applications[application_id])

    def request_course(
        self,
        actor_id: str,
        title: str,
        content: str,
        start_date: date,
        end_date: date,
    ) -> dict[str, Any]:
        with self._lock:
            payload = registration.validate_request_course(
                self._state, actor_id, title, content, start_date, end_date
            )
            self._commit("course_requested", actor_id, payload)
            return self.course_doc(payload["course_id"])

    def decide_course(
        self, actor_id: str, course_id: str, decision: str, reason: str | None = None
    ) -> dict[str, Any]:
        with self._lock:
            payload = registration.validate_decide_course(
                self._state, actor_id, course_id, decision, reason
            )
            self._commit("course_decided", actor_id, payload)
            return self.course_doc(course_id)

    def set_photo(self, actor_id: str, user_id: str, attachment_id: str) -> dict[str, Any]:
        with self._lock:
            if not self._attachments.exists(attachment_id):
                raise ValidationError(f"attachment {attachment_id!r} has not been uploaded")
            payload = registration.validate_set_photo(self._state, actor_id, user_id, attachment_id)
            self._commit("profile_photo_set", actor_id, payload)
            return self.user_doc(user_id)

    def rollover_term(self, actor_id: str) -> dict[str, Any]:
        with self._lock:
            payload = registration.validate_rollover_term(self._state, actor_id)
            self._commit("term_rolled_over", actor_id, payload)
            return {
                "closed_term_id": payload["closed_term_id"],
                "open_term": to_doc(self._state.terms[payload["new_term_id"]]),
            }

    # -- commands: enrollment and matching ------------------------------------------

    def open_enrollment(self, actor_id: str, course_id: str) -> dict[str, Any]:
        with self._lock:
            payload = matching.validate_open_enrollment(self._state, actor_id, course_id)
            self._commit("enrollment_opened", actor_id, payload)
            return self.course_doc(course_id)

    def enroll(self, actor_id: str, course_id: str, novice_id: str | None = None) -> dict[str, Any]:
        with self._lock:
            payload = matching.validate_enroll(
                self._state, actor_id, course_id, novice_id or actor_id
            )
            self._commit("novice_enrolled", actor_id, payload)
            return self.course_doc(course_id)

    def send_invitations(self, actor_id: str, course_id: str, guide_ids: list[str]) -> list[dict[str, Any]]:
        with self._lock:
            payload = matching.validate_send_invitations(
                self._state, actor_id, course_id, actor_id, guide_ids
            )
            self._commit("invitations_sent", actor_id, payload)
            return [
                to_doc(self._state.invitations[doc["invitation_id"]])
                for doc in payload["invitations"]
            ]

    def respond_invitation(self, actor_id: str, invitation_id: str, accept: bool) -> dict[str, Any]:
        with self._lock:
            payload = matching.validate_respond_invitation(
                self._state, actor_id, invitation_id, accept
            )
            self._commit("invitation_answered", actor_id, payload)
            return to_doc(self._state.invitations[invitation_id])

    def select_guide(self, actor_id: str, course_id: str, invitation_id: str) -> dict[str, Any]:
        with self._lock:
            payload = matching.validate_select_guide(
                self._state, actor_id, course_id, actor_id, invitation_id
            )
            self._commit("guide_selected", actor_id, payload)
            return {
                "match": to_doc(self._state.matches[matching.match_key(course_id, actor_id)]),
                "course": self.course_doc(course_id),
            }

    def drop_novice(self, actor_id: str, course_id: str, novice_id: str) -> dict[str, Any]:
        with self._lock:
            payload = matching.validate_drop_novice(self._state, actor_id, course_id, novice_id)
            self._commit("novice_dropped", actor_id, payload)
            return self.course_doc(course_id)

    # -- commands: coursework ---------------------------------------------------------

    def publish_material(
        self,
        actor_id: str,
        course_id: str,
        attachment: dict[str, Any],
        caption: str | None = None,
    ) -> dict[str, Any]:
        with self._lock:
            self._require_uploaded(attachment)
            payload = coursework.validate_publish_material(
                self._state, actor_id, course_id, attachment, caption
            )
            self._commit("material_published", actor_id, payload)
            return to_doc(self._state.materials[payload["material_id"]])

    def create_assignment(
        self,
        actor_id: str,
        course_id: str,
        title: str,
        start_date: date,
        deadline: date,
        body: dict[str, Any] | None = None,
    ) -> dict[str, Any]:
        with self._lock:
            if body is not None:
                self._require_uploaded(body)
            payload = coursework.validate_create_assignment(
                self._state, actor_id, course_id, title, start_date, deadline, body
            )
            self._commit("assignment_created", actor_id, payload)
            return to_doc(self._state.assignments[payload["assignment_id"]])

    def activate_assignment(self, actor_id: str, assignment_id: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_activate_assignment(self._state, actor_id, assignment_id)
            self._commit("assignment_activated", actor_id, payload)
            return {
                "assignment": to_doc(self._state.assignments[assignment_id]),
                "submissions": [
                    to_doc(self._state.submissions[doc["submission_id"]])
                    for doc in payload["submissions"]
                ],
            }

    def edit_assignment(self, actor_id: str, assignment_id: str, deadline: date) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_edit_assignment(
                self._state, actor_id, assignment_id, deadline
            )
            self._commit("assignment_edited", actor_id, payload)
            return to_doc(self._state.assignments[assignment_id])

    def submit_work(
        self, actor_id: str, submission_id: str, attachments: list[dict[str, Any]]
    ) -> dict[str, Any]:
        with self._lock:
            for doc in attachments:
                self._require_uploaded(doc)
            payload = coursework.validate_submit_work(
                self._state, actor_id, submission_id, attachments, self._clock.today()
            )
            self._commit("work_submitted", actor_id, payload)
            return to_doc(self._state.submissions[submission_id])

    def post_feedback(self, actor_id: str, submission_id: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_post_feedback(self._state, actor_id, submission_id, body)
            self._commit("feedback_posted", actor_id, payload)
            return to_doc(self._state.submissions[submission_id].feedback_thread[-1])

    def guide_evaluate(
        self, actor_id: str, submission_id: str, verdict: str, comments: str
    ) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_guide_evaluate(
                self._state, actor_id, submission_id, verdict, comments
            )
            self._commit("submission_evaluated", actor_id, payload)
            return to_doc(self._state.submissions[submission_id])

    def teacher_grade(self, actor_id: str, submission_id: str, score: Any) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_teacher_grade(self._state, actor_id, submission_id, score)
            self._commit("submission_graded", actor_id, payload)
            return to_doc(self._state.submissions[submission_id])

    def void_submission(self, actor_id: str, submission_id: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_void_submission(self._state, actor_id, submission_id)
            self._commit("submission_voided", actor_id, payload)
            return to_doc(self._state.submissions[submission_id])

    def close_course(self, actor_id: str, course_id: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_close_course(self._state, actor_id, course_id)
            self._commit("course_closed", actor_id, payload)
            return {
                "course": self.course_doc(course_id),
                "final_grades": payload["final_grades"],
            }

    def post_announcement(self, actor_id: str, course_id: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_post_announcement(self._state, actor_id, course_id, body)
            self._commit("announcement_posted", actor_id, payload)
            return to_doc(self._state.announcements[payload["announcement_id"]])

    def ask_teacher(self, actor_id: str, course_id: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_ask_teacher(self._state, actor_id, course_id, body)
            self._commit("question_asked", actor_id, payload)
            return to_doc(self._state.questions[payload["question_id"]])

    def answer_question(self, actor_id: str, question_id: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_answer_question(self._state, actor_id, question_id, body)
            self._commit("question_answered", actor_id, payload)
            return to_doc(self._state.questions[question_id])

    def open_discussion(self, actor_id: str, course_id: str, topic: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_open_discussion(
                self._state, actor_id, course_id, topic, body
            )
            self._commit("discussion_opened", actor_id, payload)
            return to_doc(self._state.discussions[payload["discussion_id"]])

    def reply_discussion(self, actor_id: str, discussion_id: str, body: str) -> dict[str, Any]:
        with self._lock:
            payload = coursework.validate_reply_discussion(
                self._state, actor_id, discussion_id, body
            )
            self._commit("discussion_replied", actor_id, payload)
            return to_doc(self._state.discussions[discussion_id])

    def _require_uploaded(self, attachment: dict[str, Any]) -> None:
        ref = coursework.attachment_from_doc(attachment)
        if not self._attachments.exists(ref.attachment_id):
            raise ValidationError(f"attachment {ref.attachment_id!r} has not been uploaded")

    # -- queries ------------------------------------------------------------------------

    def user_doc(self, user_id: str) -> dict[str, Any]:
        with self._lock:
            user = require_user(self._state, user_id)
            return {
                "user_id": user.user_id,
                "display_name": user.display_name,
                "roles": sorted(role.value for role in user.roles),
                "profile": to_doc(user.profile),
                "transcript": to_doc(user.transcript),
            }

    def find_user_id(self, display_name: str) -> str | None:
        with self._lock:
            user = registration.find_user_by_name(self._state, display_name)
            return None if user is None else user.user_id

    def course_doc(self, course_id: str) -> dict[str, Any]:
        with self._lock:
            course = require_course(self._state, course_id)
            doc = to_doc(course)
            doc["teacher_name"] = self._state.users[course.teacher_id].display_name
            doc["all_matched"] = matching.all_matched(self._state, course)
            doc["counts"] = self._course_counts(course_id)
            return doc

    def _course_counts(self, course_id: str) -> dict[str, int]:
        state = self._state
        participants = set(state.courses[course_id].enrolled_novices) | matching.guides_of_course(
            state, course_id
        )
        return {
            "announcements": sum(1 for a in state.announcements.values() if a.course_id == course_id),
            "assignments": sum(1 for a in state.assignments.values() if a.course_id == course_id),
            "materials": sum(1 for m in state.materials.values() if m.course_id == course_id),
            "participants": len(participants),
            "discussions": sum(1 for d in state.discussions.values() if d.course_id == course_id),
            "questions": sum(1 for q in state.questions.values() if q.course_id == course_id),
        }

    def list_courses(self, viewer_id: str) -> list[dict[str, Any]]:
        with self._lock:
            viewer = require_user(self._state, viewer_id)
            rows = []
            for course in self._state.courses.values():
                visible = (
                    viewer.has_role(Role.ADMIN)
                    or course.teacher_id == viewer_id
                    or (course.state.value != "requested" and course.denial_reason is None)
                )
                if visible:
                    rows.append(self.course_doc(course.course_id))
            return rows

    def query(self, view: str, params: dict[str, Any]) -> Any:
        with self._lock:
            return run_query(self._state, view, params)

    def list_invitations_for(self, viewer_id: str) -> dict[str, list[dict[str, Any]]]:
        with self._lock:
            require_user(self._state, viewer_id)
            received, sent = [], []
            for invitation in self._state.invitations.values():
                if viewer_id not in (invitation.guide_id, invitation.novice_id):
                    continue
                doc = to_doc(invitation)
                course = self._state.courses[invitation.course_id]
                doc["course_title"] = course.title
                doc["novice_name"] = self._state.users[invitation.novice_id].display_name
                doc["guide_name"] = self._state.users[invitation.guide_id].display_name
                if invitation.guide_id == viewer_id:
                    received.append(doc)
                if invitation.novice_id == viewer_id:
                    sent.append(doc)
            return {"received": received, "sent": sent}

    def list_assignments(self, viewer_id: str, course_id: str) -> list[dict[str, Any]]:
        with self._lock:
            state = self._state
            course = require_course(state, course_id)
            viewer = require_user(state, viewer_id)
            if not (
                viewer.has_role(Role.ADMIN)
                or viewer_id == course.teacher_id
                or is_participant(state, course, viewer_id)
            ):
                raise PermissionDeniedError(
                    f"assignments of {course_id} are restricted to participants",
                    course_id=course_id,
                )
            return [to_doc(a) for a in coursework.course_assignments(state, course_id)]

    def list_submissions(self, viewer_id: str, assignment_id: str) -> list[dict[str, Any]]:
        with self._lock:
            state = self._state
            assignment = coursework.require_assignment(state, assignment_id)
            course = require_course(state, assignment.course_id)
            viewer = require_user(state, viewer_id)
            rows = [
                s
                for s in state.submissions.values()
                if s.assignment_id == assignment_id
            ]
            if viewer.has_role(Role.ADMIN) or viewer_id == course.teacher_id:
                visible = rows
            else:
                visible = [
                    s for s in rows if viewer_id in (s.novice_id, s.guide_id)
                ]
            return [to_doc(s) for s in visible]

    def view_submission(self, viewer_id: str, submission_id: str) -> dict[str, Any]:
        with self._lock:
            return to_doc(coursework.view_submission(self._state, viewer_id, submission_id))

    def list_announcements(self, viewer_id: str, course_id: str) -> list[dict[str, Any]]:
        with self._lock:
            return [
                to_doc(a) for a in coursework.course_announcements(self._state, viewer_id, course_id)
            ]

    def list_questions(self, viewer_id: str, course_id: str) -> list[dict[str, Any]]:
        with self._lock:
            return [
                to_doc(q) for q in coursework.course_questions(self._state, viewer_id, course_id)
            ]

    def list_discussions(self, viewer_id: str, course_id: str) -> list[dict[str, Any]]:
        with self._lock:
            return [
                to_doc(d) for d in coursework.course_discussions(self._state, viewer_id, course_id)
            ]

    def pending_approvals(self, viewer_id: str) -> dict[str, list[dict[str, Any]]]:
        with self._lock:
            require_admin(self._state, viewer_id)
            applications = [
                to_doc(a)
                for a in self._state.applications.values()
                if a.status is registration.ApplicationStatus.PENDING
            ]
            courses = [
                self.course_doc(c.course_id)
                for c in self._state.courses.values()
                if not c.decided
            ]
            return {"teacher_applications": applications, "course_requests": courses}

    def list_users(self, viewer_id: str) -> list[dict[str, Any]]:
        with self._lock:
            require_user(self._state, viewer_id)
            return [self.user_doc(user_id) for user_id in self._state.users]

    def terms_doc(self) -> dict[str, Any]:
        with self._lock:
            return {
                "open_term_id": self._state.open_term_id,
                "terms": [to_doc(t) for t in self._state.terms.values()],
            }
