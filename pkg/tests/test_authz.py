"""The authorization matrix: duties allowed, everything else denied.

The matrix is a closed catalog — every action names its granted roles,
unknown actions are errors, and the complement of the grant table is
swept to prove deny-by-default, both in the module and over HTTP.
"""

from __future__ import annotations

import random

import pytest

from knet.api.authz import ANY, ACTIONS, MATRIX, ROLES, decide, matrix_doc, require
from knet.errors import NotFoundError, PermissionDeniedError

from .test_api import Web, expect_error

# Each role's core duties: the actions that let it do its job.
DUTIES: dict[str, list[str]] = {
    "admin": ["approve_teacher", "approve_course"],
    "teacher": [
        "request_course",
        "open_enrollment",
        "drop_novice",
        "publish_material",
        "create_assignment",
        "answer_question",
        "view_submissions",
        "teacher_grade",
        "close_course",
    ],
    "guide_student": ["respond_invitation", "post_feedback", "guide_evaluate", "view_submissions"],
    "guide_alumni": ["respond_invitation", "post_feedback", "guide_evaluate", "view_submissions"],
    "novice": ["enroll", "send_invitations", "select_guide", "submit_work", "ask_teacher"],
}


@pytest.fixture()
def web(active) -> Web:
    return Web(active)


# -- the grant table -------------------------------------------------------------------


def test_every_core_duty_is_granted() -> None:
    for role, actions in DUTIES.items():
        for action in actions:
            assert decide({role}, action), f"{role} must be allowed {action}"


def test_the_matrix_is_total_over_the_catalog() -> None:
    for action in ACTIONS:
        for role in ROLES:
            assert decide({role}, action) in (True, False)


def test_unknown_actions_are_an_error_not_a_quiet_deny() -> None:
    with pytest.raises(NotFoundError):
        decide({"admin"}, "declare_martial_law")
    with pytest.raises(NotFoundError) as caught:
        require({"admin"}, "declare_martial_law")
    assert caught.value.details["action"] == "declare_martial_law"


def test_require_raises_with_the_action_named() -> None:
    with pytest.raises(PermissionDeniedError) as caught:
        require({"novice"}, "approve_course")
    assert caught.value.details["action"] == "approve_course"
    assert caught.value.code == "permission_denied"


def test_an_empty_role_set_is_denied_everything_but_any_actions() -> None:
    for action, granted in MATRIX.items():
        assert decide(set(), action) is (ANY in granted)


def test_the_published_matrix_document_is_faithful() -> None:
    doc = matrix_doc()
    assert doc["roles"] == sorted(ROLES)
    assert set(doc["actions"]) == set(ACTIONS)
    for action, granted in doc["actions"].items():
        assert granted == sorted(MATRIX[action])


# -- deny-by-default ---------------------------------------------------------------------


def test_the_entire_complement_of_the_grant_table_is_denied() -> None:
    denied = 0
    for action, granted in MATRIX.items():
        if ANY in granted:
            continue
        for role in ROLES - granted:
            assert decide({role}, action) is False, f"{role} must not be allowed {action}"
            denied += 1
    assert denied >= 25


def test_random_role_sets_decide_exactly_by_intersection() -> None:
    rng = random.Random(20190401)
    roles = sorted(ROLES)
    for _ in range(500):
        subset = {role for role in roles if rng.random() < 0.4}
        action = rng.choice(sorted(ACTIONS))
        granted = MATRIX[action]
        expected = ANY in granted or bool(granted & subset)
        assert decide(subset, action) is expected


# -- the same wall, over HTTP ---------------------------------------------------------------

# (label, login name, method, path template, body) — every one must bounce with 403.
FORBIDDEN: list[tuple[str, str, str, str, dict | None]] = [
    ("novice approves a course", "Çaylak 1", "POST", "/api/admin/approvals",
     {"target": "course-request", "target_id": "{course}", "decision": "approved"}),
    ("novice approves a teacher", "Çaylak 1", "POST", "/api/admin/approvals",
     {"target": "teacher-application", "target_id": "x", "decision": "approved"}),
    ("novice reads the approval queue", "Çaylak 1", "GET", "/api/admin/approvals", None),
    ("novice rolls the term", "Çaylak 1", "POST", "/api/admin/term-rollovers", None),
    ("novice moves the clock", "Çaylak 1", "POST", "/api/admin/clock", {"today": "2019-05-01"}),
    ("novice reads the journal head", "Çaylak 1", "GET", "/api/admin/journal-head", None),
    ("novice requests a course", "Çaylak 1", "POST", "/api/courses",
     {"title": "X", "start_date": "2019-04-01", "end_date": "2019-05-01"}),
    ("novice opens enrollment", "Çaylak 1", "POST", "/api/courses/{course}/enrollment-opening", None),
    ("novice drops an enrollment", "Çaylak 1", "DELETE", "/api/courses/{course}/enrollments/x", None),
    ("novice publishes material", "Çaylak 1", "POST", "/api/courses/{course}/materials",
     {"attachment": {"attachment_id": "x", "filename": "f", "media_type": "t"}}),
    ("novice creates an assignment", "Çaylak 1", "POST", "/api/courses/{course}/assignments",
     {"title": "X", "start_date": "2019-04-12", "deadline": "2019-04-14"}),
    ("novice activates an assignment", "Çaylak 1", "POST", "/api/assignments/x/activation", None),
    ("novice extends a deadline", "Çaylak 1", "PATCH", "/api/assignments/x",
     {"deadline": "2019-05-01"}),
    ("admin plays guide evaluator", "admin", "POST", "/api/submissions/x/guide-evaluation",
     {"verdict": "approve"}),
    ("novice assigns a teacher grade", "Çaylak 1", "POST", "/api/submissions/x/teacher-grade",
     {"score": 100.0}),
    ("novice voids a submission", "Çaylak 1", "POST", "/api/submissions/x/void", None),
    ("novice closes the course", "Çaylak 1", "POST", "/api/courses/{course}/closure", None),
    ("novice posts an announcement", "Çaylak 1", "POST", "/api/courses/{course}/announcements",
     {"body": "duyuru"}),
    ("novice answers a question", "Çaylak 1", "POST", "/api/questions/x/answer", {"body": "cevap"}),
    ("alumni guide enrolls", "Kılavuz 1", "POST", "/api/courses/{course}/enrollments", {}),
    ("alumni guide sends invitations", "Kılavuz 1", "POST", "/api/courses/{course}/invitations",
     {"guide_ids": ["x"]}),
    ("alumni guide selects a guide", "Kılavuz 1", "POST", "/api/courses/{course}/guide-selection",
     {"invitation_id": "x"}),
    ("alumni guide submits work", "Kılavuz 1", "POST", "/api/submissions/x/drafts",
     {"attachments": []}),
    ("alumni guide assigns a teacher grade", "Kılavuz 1", "POST",
     "/api/submissions/x/teacher-grade", {"score": 50.0}),
    ("alumni guide asks the teacher", "Kılavuz 1", "POST", "/api/courses/{course}/questions",
     {"body": "soru"}),
    ("alumni guide closes the course", "Kılavuz 1", "POST", "/api/courses/{course}/closure", None),
    ("alumni guide approves applications", "Kılavuz 1", "GET", "/api/admin/approvals", None),
    ("teacher enrolls as a novice", "Öğretmen Hoca", "POST",
     "/api/courses/{course}/enrollments", {}),
    ("teacher answers an invitation", "Öğretmen Hoca", "POST", "/api/invitations/x/response",
     {"accept": True}),
    ("teacher plays guide evaluator", "Öğretmen Hoca", "POST",
     "/api/submissions/x/guide-evaluation", {"verdict": "approve"}),
    ("teacher rolls the term", "Öğretmen Hoca", "POST", "/api/admin/term-rollovers", None),
    ("admin enrolls as a novice", "admin", "POST", "/api/courses/{course}/enrollments", {}),
    ("admin assigns a teacher grade", "admin", "POST", "/api/submissions/x/teacher-grade",
     {"score": 60.0}),
    ("admin submits work", "admin", "POST", "/api/submissions/x/drafts", {"attachments": []}),
]


def test_at_least_twenty_five_cross_role_calls_bounce_with_403(web: Web) -> None:
    assert len(FORBIDDEN) >= 25
    before = web.service.head_seq
    tokens = {
        "Çaylak 1": web.as_novice(),
        "Kılavuz 1": web.as_guide(0),
        "Öğretmen Hoca": web.as_teacher(),
        "admin": web.as_admin(),
    }
    for label, name, method, path, body in FORBIDDEN:
        response = web.client.request(
            method,
            path.replace("{course}", web.net.course),
            headers=tokens[name],
            json=body,
        )
        error = expect_error(response, 403, "permission_denied")
        assert error["message"], label
    assert web.service.head_seq == before


def test_denied_calls_leave_no_trace_in_views(web: Web) -> None:
    web.client.post(
        f"/api/courses/{web.net.course}/announcements",
        headers=web.as_novice(),
        json={"body": "korsan duyuru"},
    )
    listed = web.client.get(
        f"/api/courses/{web.net.course}/announcements", headers=web.as_teacher()
    )
    assert listed.json() == []
