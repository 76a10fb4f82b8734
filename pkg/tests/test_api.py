"""HTTP facade: routes, sessions, the error envelope, and wire formats.

The contract here is deliberately strict — paths are part of the API,
every failure wears the same envelope, and each successful mutation
lands exactly one journal event.
"""

from __future__ import annotations

import base64
import hashlib
import re
from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from knet.api.app import create_app
from knet.api.authz import matrix_doc
from knet.api.sessions import SessionStore
from knet.attachments import MAX_ATTACHMENT_BYTES

from .conftest import COURSE_TITLE, Net

# The published resource routes, with path parameters normalised to {id}.
CONTRACT_ROUTES = {
    ("POST", "/api/users"),
    ("POST", "/api/sessions"),
    ("POST", "/api/teacher-applications"),
    ("POST", "/api/admin/approvals"),
    ("POST", "/api/courses"),
    ("POST", "/api/courses/{id}/enrollments"),
    ("GET", "/api/courses/{id}/guide-candidates"),
    ("POST", "/api/courses/{id}/invitations"),
    ("POST", "/api/invitations/{id}/response"),
    ("POST", "/api/courses/{id}/guide-selection"),
    ("POST", "/api/courses/{id}/materials"),
    ("POST", "/api/courses/{id}/assignments"),
    ("POST", "/api/assignments/{id}/activation"),
    ("POST", "/api/submissions/{id}/drafts"),
    ("POST", "/api/submissions/{id}/feedback"),
    ("POST", "/api/submissions/{id}/guide-evaluation"),
    ("POST", "/api/submissions/{id}/teacher-grade"),
    ("POST", "/api/courses/{id}/closure"),
    ("GET", "/api/users/{id}/portfolio"),
    ("GET", "/api/courses/{id}/grades"),
    ("POST", "/api/courses/{id}/announcements"),
    ("GET", "/api/courses/{id}/announcements"),
    ("POST", "/api/courses/{id}/questions"),
    ("GET", "/api/courses/{id}/questions"),
    ("POST", "/api/questions/{id}/answer"),
    ("POST", "/api/courses/{id}/discussions"),
    ("GET", "/api/courses/{id}/discussions"),
    ("POST", "/api/discussions/{id}/replies"),
}


class Web:
    """A network wrapped in its HTTP facade plus login helpers."""

    def __init__(self, net: Net) -> None:
        self.net = net
        self.service = net.service
        self.sessions = SessionStore()
        self.app = create_app(net.service, sessions=self.sessions)
        self.client = TestClient(self.app, raise_server_exceptions=False)

    def login(self, display_name: str, password: str = "pw") -> str:
        response = self.client.post(
            "/api/sessions", json={"display_name": display_name, "password": password}
        )
        assert response.status_code == 201, response.text
        return response.json()["token"]

    def auth(self, token: str) -> dict[str, str]:
        return {"Authorization": f"Bearer {token}"}

    def as_teacher(self) -> dict[str, str]:
        return self.auth(self.login("Öğretmen Hoca"))

    def as_admin(self) -> dict[str, str]:
        return self.auth(self.login("admin", "admin"))

    def as_novice(self, index: int = 0) -> dict[str, str]:
        return self.auth(self.login(f"Çaylak {index + 1}"))

    def as_guide(self, index: int = 0) -> dict[str, str]:
        return self.auth(self.login(f"Kılavuz {index + 1}"))


@pytest.fixture()
def web(active: Net) -> Web:
    return Web(active)


@pytest.fixture()
def open_web(enrolling: Net) -> Web:
    return Web(enrolling)


def expect_error(response, status: int, code: str) -> dict:
    assert response.status_code == status, response.text
    body = response.json()
    assert set(body) == {"error"}
    assert set(body["error"]) >= {"code", "message"}
    assert body["error"]["code"] == code
    assert isinstance(body["error"]["message"], str) and body["error"]["message"]
    return body["error"]


# -- the route table ------------------------------------------------------------------


def test_the_published_route_table_covers_the_contract(web: Web) -> None:
    served = set()
    for route in web.app.routes:
        methods = getattr(route, "methods", None)
        path = getattr(route, "path", None)
        if not methods or path is None:
            continue
        for method in methods - {"HEAD", "OPTIONS"}:
            served.add((method, re.sub(r"\{[^}]*\}", "{id}", path)))
    missing = CONTRACT_ROUTES - served
    assert missing == set()


# -- sessions and authentication --------------------------------------------------------


def test_login_returns_a_bearer_token_and_profile(web: Web) -> None:
    response = web.client.post(
        "/api/sessions", json={"display_name": "Çaylak 1", "password": "pw"}
    )
    assert response.status_code == 201
    body = response.json()
    assert len(body["token"]) >= 32
    assert datetime.fromisoformat(body["expires_at"]) > datetime.now(timezone.utc)
    assert body["user"]["display_name"] == "Çaylak 1"
    assert body["user"]["roles"] == ["guide_student", "novice"]

    me = web.client.get("/api/users/me", headers=web.auth(body["token"]))
    assert me.status_code == 200
    assert me.json()["user_id"] == body["user"]["user_id"]


def test_a_wrong_password_reads_as_an_authentication_failure(web: Web) -> None:
    response = web.client.post(
        "/api/sessions", json={"display_name": "Çaylak 1", "password": "yanlış"}
    )
    expect_error(response, 401, "authentication_required")


def test_requests_without_a_token_are_unauthenticated(web: Web) -> None:
    expect_error(web.client.get("/api/users/me"), 401, "authentication_required")
    expect_error(
        web.client.post("/api/courses/x/announcements", json={"body": "selam"}),
        401,
        "authentication_required",
    )


def test_garbage_and_malformed_tokens_are_unauthenticated(web: Web) -> None:
    expect_error(
        web.client.get("/api/users/me", headers={"Authorization": "Bearer bozuk-jeton"}),
        401,
        "authentication_required",
    )
    expect_error(
        web.client.get("/api/users/me", headers={"Authorization": "Basic dXNlcjpwdw=="}),
        401,
        "authentication_required",
    )


def test_logout_invalidates_the_token(web: Web) -> None:
    token = web.login("Çaylak 1")
    headers = web.auth(token)
    assert web.client.get("/api/users/me", headers=headers).status_code == 200

    response = web.client.delete("/api/sessions/current", headers=headers)
    assert response.status_code == 204
    assert response.content == b""

    expect_error(web.client.get("/api/users/me", headers=headers), 401, "authentication_required")


def test_an_expired_session_is_rejected(web: Web) -> None:
    token = web.login("Çaylak 1")
    web.sessions._sessions[token].expires_at = datetime.now(timezone.utc) - timedelta(seconds=1)
    error = expect_error(
        web.client.get("/api/users/me", headers=web.auth(token)), 401, "authentication_required"
    )
    assert "expired" in error["message"]


def test_touching_a_session_slides_its_expiry(web: Web) -> None:
    token = web.login("Çaylak 1")
    before = web.sessions._sessions[token].expires_at
    web.sessions._sessions[token].expires_at = before - timedelta(hours=12)
    assert web.client.get("/api/users/me", headers=web.auth(token)).status_code == 200
    assert web.sessions._sessions[token].expires_at > before - timedelta(hours=12)


def test_forbidden_is_distinct_from_unauthenticated(web: Web) -> None:
    expect_error(web.client.post("/api/admin/term-rollovers"), 401, "authentication_required")
    expect_error(
        web.client.post("/api/admin/term-rollovers", headers=web.as_novice()),
        403,
        "permission_denied",
    )


# -- the error envelope ------------------------------------------------------------------


def test_every_error_wears_the_same_envelope(web: Web) -> None:
    teacher = web.as_teacher()

    expect_error(web.client.get("/api/courses/ders-yok", headers=teacher), 404, "not_found")
    expect_error(
        web.client.post(f"/api/courses/{web.net.course}/enrollment-opening", headers=teacher),
        409,
        "illegal_transition",
    )
    expect_error(
        web.client.post(
            f"/api/courses/{web.net.course}/enrollments",
            headers=web.as_guide(),
            json={},
        ),
        403,
        "permission_denied",
    )
    expect_error(
        web.client.post(
            f"/api/courses/{web.net.course}/assignments", headers=teacher, json={}
        ),
        400,
        "validation_error",
    )


def test_ineligible_invitees_map_to_unprocessable(open_web: Web) -> None:
    novice = open_web.as_novice()
    course = open_web.net.course
    assert (
        open_web.client.post(f"/api/courses/{course}/enrollments", headers=novice, json={}).status_code
        == 201
    )
    stranger = open_web.net.novices[1]
    error = expect_error(
        open_web.client.post(
            f"/api/courses/{course}/invitations",
            headers=novice,
            json={"guide_ids": [stranger]},
        ),
        422,
        "not_eligible",
    )
    assert stranger in str(error.get("details", error["message"]))


def test_body_validation_failures_map_to_400(web: Web) -> None:
    response = web.client.post("/api/users", json={"display_name": "Eksik"})
    error = expect_error(response, 400, "validation_error")
    assert "password" in error["message"]


def test_unknown_body_fields_are_rejected(web: Web) -> None:
    response = web.client.post(
        "/api/users",
        json={"display_name": "X", "password": "pw", "role_intent": "student", "mystery": 1},
    )
    expect_error(response, 400, "validation_error")


# -- one event per mutation ----------------------------------------------------------------


def test_a_successful_mutation_appends_exactly_one_event(web: Web) -> None:
    admin = web.as_admin()
    before = web.client.get("/api/admin/journal-head", headers=admin).json()["head_seq"]
    assert before == web.service.head_seq

    response = web.client.post(
        f"/api/courses/{web.net.course}/announcements",
        headers=web.as_teacher(),
        json={"body": "Hoş geldiniz"},
    )
    assert response.status_code == 201

    after = web.client.get("/api/admin/journal-head", headers=admin).json()["head_seq"]
    assert after == before + 1


def test_failed_mutations_append_nothing(web: Web) -> None:
    before = web.service.head_seq
    submission = web.service.query(
        "course_roster", {"viewer_id": web.net.teacher, "course_id": web.net.course}
    )

    # authorization failure
    assert (
        web.client.post(
            "/api/courses/x/closure", headers=web.as_novice()
        ).status_code
        == 403
    )
    # domain failure past authorization
    assert (
        web.client.post(
            f"/api/courses/{web.net.course}/enrollment-opening", headers=web.as_teacher()
        ).status_code
        == 409
    )
    # schema failure
    assert (
        web.client.post(
            f"/api/courses/{web.net.course}/assignments", headers=web.as_teacher(), json={}
        ).status_code
        == 400
    )
    assert web.service.head_seq == before
    assert submission is not None  # roster query above is a read, asserted below too


def test_reads_never_append(web: Web) -> None:
    before = web.service.head_seq
    teacher = web.as_teacher()
    for path in (
        "/api/courses",
        f"/api/courses/{web.net.course}",
        f"/api/courses/{web.net.course}/roster",
        f"/api/courses/{web.net.course}/grades",
        f"/api/courses/{web.net.course}/announcements",
        "/api/users",
        "/api/terms",
        "/api/healthz",
    ):
        assert web.client.get(path, headers=teacher).status_code == 200
    assert web.service.head_seq == before


# -- wire formats ----------------------------------------------------------------------------


def test_dates_travel_as_iso_strings(web: Web) -> None:
    teacher = web.as_teacher()
    course = web.client.get(f"/api/courses/{web.net.course}", headers=teacher).json()
    assert course["start_date"] == "2019-04-01"
    assert course["end_date"] == "2019-06-30"
    assert course["state"] == "active"

    created = web.client.post(
        f"/api/courses/{web.net.course}/assignments",
        headers=teacher,
        json={"title": "ÖDEV 1", "start_date": "2019-04-12", "deadline": "2019-04-14"},
    )
    assert created.status_code == 201
    assert created.json()["start_date"] == "2019-04-12"
    assert created.json()["deadline"] == "2019-04-14"

    health = web.client.get("/api/healthz").json()
    assert health["today"] == "2019-04-01"


def test_course_documents_round_trip_over_http(web: Web) -> None:
    doc = web.service.course_doc(web.net.course)
    wire = web.client.get(f"/api/courses/{web.net.course}", headers=web.as_novice()).json()
    for key in ("course_id", "title", "teacher_id", "state", "enrolled_novices", "all_matched"):
        assert wire[key] == doc[key]
    assert wire["title"] == COURSE_TITLE


# -- attachments ------------------------------------------------------------------------------


def test_uploads_round_trip_through_the_blob_store(web: Web) -> None:
    content = "merhaba dünya".encode("utf-8")
    response = web.client.post(
        "/api/attachments",
        headers=web.as_novice(),
        json={
            "filename": "merhaba.txt",
            "media_type": "text/plain",
            "content_base64": base64.b64encode(content).decode("ascii"),
        },
    )
    assert response.status_code == 201
    doc = response.json()
    assert doc["attachment_id"] == hashlib.sha256(content).hexdigest()
    assert doc["filename"] == "merhaba.txt"

    download = web.client.get(
        f"/api/attachments/{doc['attachment_id']}", headers=web.as_novice()
    )
    assert download.status_code == 200
    assert download.content == content


def test_oversized_uploads_are_rejected(web: Web) -> None:
    blob = base64.b64encode(b"\0" * (MAX_ATTACHMENT_BYTES + 1)).decode("ascii")
    response = web.client.post(
        "/api/attachments",
        headers=web.as_novice(),
        json={"filename": "kocaman.bin", "content_base64": blob},
    )
    expect_error(response, 400, "validation_error")


def test_non_base64_uploads_are_rejected(web: Web) -> None:
    response = web.client.post(
        "/api/attachments",
        headers=web.as_novice(),
        json={"filename": "bozuk.bin", "content_base64": "bu base64 değil!!"},
    )
    expect_error(response, 400, "validation_error")


# -- meta and health ---------------------------------------------------------------------------


def test_the_authorization_matrix_is_published(web: Web) -> None:
    response = web.client.get("/api/meta/authorization", headers=web.as_novice())
    assert response.status_code == 200
    assert response.json() == matrix_doc()


def test_health_reports_head_and_clock_without_auth(web: Web) -> None:
    response = web.client.get("/api/healthz")
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["head_seq"] == web.service.head_seq
    assert body["today"] == web.service.today().isoformat()


# -- the whole workflow, driven purely over HTTP ------------------------------------------------


def test_the_whole_workflow_can_be_driven_over_http(tmp_path) -> None:
    from datetime import date

    from knet.service import NetworkService

    service = NetworkService.in_memory(sim_date=date(2019, 4, 1))
    sessions = SessionStore()
    client = TestClient(create_app(service, sessions=sessions), raise_server_exceptions=False)

    def login(name: str, password: str = "pw") -> dict[str, str]:
        body = client.post("/api/sessions", json={"display_name": name, "password": password})
        assert body.status_code == 201, body.text
        return {"Authorization": f"Bearer {body.json()['token']}"}

    def post(path: str, headers: dict[str, str], status: int = 201, **json) -> dict:
        response = client.post(path, headers=headers, json=json or None)
        assert response.status_code == status, f"{path}: {response.text}"
        return response.json()

    # cast: teacher applies and is approved, one guide, one novice
    teacher_id = post(
        "/api/users",
        {},
        display_name="Hoca",
        password="pw",
        role_intent="teacher",
        intake={"teachable_courses": ["Arıcılık"]},
    )["user_id"]
    admin = login("admin", "admin")
    queue = client.get("/api/admin/approvals", headers=admin).json()
    post(
        "/api/admin/approvals",
        admin,
        status=200,
        target="teacher-application",
        target_id=queue["teacher_applications"][0]["application_id"],
        decision="approved",
    )
    guide_id = post(
        "/api/users",
        {},
        display_name="Usta",
        password="pw",
        role_intent="alumni",
        intake={"prior_courses": [{"course_title": "Arıcılık", "letter_grade": "AA"}]},
    )["user_id"]
    novice_id = post(
        "/api/users", {}, display_name="Acemi", password="pw", role_intent="student", intake={}
    )["user_id"]

    teacher, guide, novice = login("Hoca"), login("Usta"), login("Acemi")

    # course: request, approve, open, enroll, invite, accept, select
    course_id = post(
        "/api/courses",
        teacher,
        title="Arıcılık",
        content="bal",
        start_date="2019-04-01",
        end_date="2019-06-30",
    )["course_id"]
    post(
        "/api/admin/approvals",
        admin,
        status=200,
        target="course-request",
        target_id=course_id,
        decision="approved",
    )
    post(f"/api/courses/{course_id}/enrollment-opening", teacher, status=200)
    post(f"/api/courses/{course_id}/enrollments", novice)
    candidates = client.get(f"/api/courses/{course_id}/guide-candidates", headers=novice).json()
    assert [c["user_id"] for c in candidates] == [guide_id]
    invitation = post(f"/api/courses/{course_id}/invitations", novice, guide_ids=[guide_id])[0]
    inbox = client.get(f"/api/users/{guide_id}/invitations", headers=guide).json()
    assert inbox["received"][0]["invitation_id"] == invitation["invitation_id"]
    post(
        f"/api/invitations/{invitation['invitation_id']}/response", guide, status=200, accept=True
    )
    selection = post(
        f"/api/courses/{course_id}/guide-selection",
        novice,
        invitation_id=invitation["invitation_id"],
    )
    assert selection["course"]["state"] == "active"

    # coursework: assignment, activation, draft, feedback, evaluation, grade
    blob = post(
        "/api/attachments",
        novice,
        filename="odev.pdf",
        content_base64=base64.b64encode("çalışmam".encode()).decode(),
    )
    assignment_id = post(
        f"/api/courses/{course_id}/assignments",
        teacher,
        title="ÖDEV 1",
        start_date="2019-04-12",
        deadline="2019-04-14",
    )["assignment_id"]
    post("/api/admin/clock", admin, status=200, today="2019-04-12")
    activation = post(f"/api/assignments/{assignment_id}/activation", teacher, status=200)
    submission_id = activation["submissions"][0]["submission_id"]
    post(f"/api/submissions/{submission_id}/drafts", novice, attachments=[blob])
    post(f"/api/submissions/{submission_id}/feedback", guide, body="Güzel başlangıç")
    post(
        f"/api/submissions/{submission_id}/guide-evaluation",
        guide,
        status=200,
        verdict="approve",
        comments="hazır",
    )
    graded = post(
        f"/api/submissions/{submission_id}/teacher-grade", teacher, status=200, score=91.0
    )
    assert graded["state"] == "graded"

    # close and inspect the artefacts
    closure = post(f"/api/courses/{course_id}/closure", teacher, status=200)
    assert closure["course"]["state"] == "closed"
    assert closure["final_grades"][0]["letter_grade"] == "AA"

    grades = client.get(f"/api/courses/{course_id}/grades", headers=teacher).json()
    assert grades[0]["average"] == 91.0
    portfolio = client.get(f"/api/users/{novice_id}/portfolio", headers=guide).json()
    assert [entry["assignment_title"] for entry in portfolio] == ["ÖDEV 1"]
    transcript = client.get(f"/api/users/{novice_id}", headers=teacher).json()["transcript"]
    assert transcript[0]["letter_grade"] == "AA"
