"""Matching protocol: invitations, caps, selection, dropping, activation.

Unit flows cover every documented error path; the capstone test replays
every interleaving of the protocol on a 4x4 instance against the
independent reference automaton in refmodel.py.
"""

from __future__ import annotations

import pytest

from knet.errors import (
    AlreadyMatchedError,
    CapacityError,
    ConflictError,
    EligibilityError,
    NotFoundError,
    PermissionDeniedError,
    StateError,
    ValidationError,
)
from knet.matching import all_matched, match_key

from . import oracles, refmodel
from .conftest import COURSE_TITLE, Net


def _invite(net: Net, novice: str, guides: list[str]) -> list[str]:
    sent = net.service.send_invitations(novice, net.course, guides)
    return [doc["invitation_id"] for doc in sent]


def _status(net: Net, invitation_id: str) -> str:
    return net.service.state.invitations[invitation_id].status.value


# -- the novice's invitation cap -----------------------------------------------


def test_novice_may_hold_five_open_invitations(enrolling: Net):
    enrolling.enroll_all()
    ids = _invite(enrolling, enrolling.novices[0], enrolling.guides[:5])
    assert len(ids) == 5
    assert all(_status(enrolling, i) == "pending" for i in ids)


def test_sixth_open_invitation_exceeds_the_cap(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    _invite(enrolling, novice, enrolling.guides[:5])
    head = enrolling.service.head_seq
    with pytest.raises(CapacityError) as exc:
        enrolling.service.send_invitations(novice, enrolling.course, [enrolling.guides[5]])
    assert exc.value.code == "capacity_exceeded"
    assert enrolling.service.head_seq == head  # nothing was journaled


def test_overfull_batch_is_atomically_rejected(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    _invite(enrolling, novice, enrolling.guides[:3])
    before = dict(enrolling.service.state.invitations)
    with pytest.raises(CapacityError):
        enrolling.service.send_invitations(novice, enrolling.course, enrolling.guides[3:6])
    assert enrolling.service.state.invitations == before


def test_batch_of_six_from_scratch_is_rejected(enrolling: Net):
    net = Net(guide_count=6)
    net.approve_course()
    net.open_enrollment()
    net.service.enroll(net.novices[0], net.course)
    with pytest.raises(CapacityError):
        net.service.send_invitations(net.novices[0], net.course, net.guides)
    assert not net.service.state.invitations


def test_decline_frees_a_slot_for_a_new_candidate(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, enrolling.guides[:5])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], False)
    assert _status(enrolling, ids[0]) == "declined"
    assert oracles.active_invitations(enrolling.service.state)[(enrolling.course, novice)] == 4
    replacement = _invite(enrolling, novice, [enrolling.guides[5]])
    assert _status(enrolling, replacement[0]) == "pending"


def test_declined_guide_cannot_be_invited_again(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, [enrolling.guides[0]])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], False)
    with pytest.raises(ConflictError):
        enrolling.service.send_invitations(novice, enrolling.course, [enrolling.guides[0]])


def test_pending_guide_cannot_be_invited_again(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    _invite(enrolling, novice, [enrolling.guides[0]])
    with pytest.raises(ConflictError):
        enrolling.service.send_invitations(novice, enrolling.course, [enrolling.guides[0]])


# -- the guide's acceptance cap ------------------------------------------------


def test_guide_accepts_at_most_five_novices():
    net = Net(novice_count=6, guide_count=2)
    net.approve_course()
    net.open_enrollment()
    net.enroll_all()
    star = net.guides[0]
    pending = {n: _invite(net, n, [star])[0] for n in net.novices}
    for novice in net.novices[:5]:
        net.service.respond_invitation(star, pending[novice], True)
    with pytest.raises(CapacityError) as exc:
        net.service.respond_invitation(star, pending[net.novices[5]], True)
    assert exc.value.code == "capacity_exceeded"
    counted = oracles.accepted_per_guide(net.service.state)[(net.course, star)]
    assert counted == 5
    # declining the sixth is still possible
    net.service.respond_invitation(star, pending[net.novices[5]], False)


def test_supersession_releases_the_guides_slot():
    net = Net(novice_count=6, guide_count=2)
    net.approve_course()
    net.open_enrollment()
    net.enroll_all()
    star, other = net.guides
    pending = {n: _invite(net, n, [star])[0] for n in net.novices[:5]}
    for novice, invitation in pending.items():
        net.service.respond_invitation(star, invitation, True)
    # the first novice walks away to the other guide; star's slot opens
    side = _invite(net, net.novices[0], [other])[0]
    net.service.respond_invitation(other, side, True)
    net.service.select_guide(net.novices[0], net.course, side)
    assert _status(net, pending[net.novices[0]]) == "superseded"
    sixth = _invite(net, net.novices[5], [star])[0]
    net.service.respond_invitation(star, sixth, True)
    assert _status(net, sixth) == "accepted"


# -- batch validation and eligibility --------------------------------------------


def test_inviting_an_ineligible_guide_names_the_guide(enrolling: Net):
    enrolling.enroll_all()
    doc = enrolling.service.register(
        "Kalamış FF", "pw", "alumni",
        {"prior_courses": [{"course_title": COURSE_TITLE, "letter_grade": "FF"}]},
    )
    failing = doc["user_id"]
    head = enrolling.service.head_seq
    with pytest.raises(EligibilityError) as exc:
        enrolling.service.send_invitations(
            enrolling.novices[0], enrolling.course, [enrolling.guides[0], failing]
        )
    assert failing in str(exc.value)
    assert exc.value.code == "not_eligible"
    assert enrolling.service.head_seq == head  # batch is all-or-none


def test_the_teacher_cannot_be_invited(enrolling: Net):
    enrolling.enroll_all()
    with pytest.raises(EligibilityError):
        enrolling.service.send_invitations(
            enrolling.novices[0], enrolling.course, [enrolling.teacher]
        )


def test_a_novice_cannot_invite_themselves(enrolling: Net):
    enrolling.enroll_all()
    with pytest.raises((ConflictError, EligibilityError)):
        enrolling.service.send_invitations(
            enrolling.novices[0], enrolling.course, [enrolling.novices[0]]
        )


@pytest.mark.parametrize("batch", [[], ["dup", "dup"]])
def test_malformed_batches_are_rejected(enrolling: Net, batch: list[str]):
    enrolling.enroll_all()
    batch = [enrolling.guides[0] if g == "dup" else g for g in batch]
    with pytest.raises(ValidationError):
        enrolling.service.send_invitations(enrolling.novices[0], enrolling.course, batch)


def test_unenrolled_novice_cannot_invite(enrolling: Net):
    with pytest.raises(StateError):
        enrolling.service.send_invitations(
            enrolling.novices[0], enrolling.course, [enrolling.guides[0]]
        )


def test_only_the_addressed_guide_may_respond(enrolling: Net):
    enrolling.enroll_all()
    invitation = _invite(enrolling, enrolling.novices[0], [enrolling.guides[0]])[0]
    with pytest.raises(PermissionDeniedError):
        enrolling.service.respond_invitation(enrolling.guides[1], invitation, True)


def test_an_invitation_is_answered_once(enrolling: Net):
    enrolling.enroll_all()
    invitation = _invite(enrolling, enrolling.novices[0], [enrolling.guides[0]])[0]
    enrolling.service.respond_invitation(enrolling.guides[0], invitation, True)
    with pytest.raises(StateError):
        enrolling.service.respond_invitation(enrolling.guides[0], invitation, False)


def test_responding_to_an_unknown_invitation(enrolling: Net):
    with pytest.raises(NotFoundError):
        enrolling.service.respond_invitation(enrolling.guides[0], "inv-404", True)


# -- candidate listing -----------------------------------------------------------


def test_candidates_are_exactly_the_eligible_users_sorted(enrolling: Net):
    service = enrolling.service
    # four ineligible additions: failed alumni, transcriptless student,
    # wrong-course alumni, and a second teacher account
    service.register(
        "Başarısız", "pw", "alumni",
        {"prior_courses": [{"course_title": COURSE_TITLE, "letter_grade": "FD"}]},
    )
    service.register("Transkriptsiz", "pw", "student", {})
    service.register(
        "Başka Ders", "pw", "alumni",
        {"prior_courses": [{"course_title": "Arıcılık", "letter_grade": "AA"}]},
    )
    service.register("Yeni Hoca", "pw", "teacher", {"teachable_courses": ["Arıcılık"]})

    rows = service.query(
        "candidate_guides",
        {"viewer_id": enrolling.teacher, "course_id": enrolling.course},
    )
    listed = [row["user_id"] for row in rows]
    expected = sorted(
        (
            u.user_id
            for u in service.state.users.values()
            if u.user_id != enrolling.teacher
            and oracles.oracle_guide_eligible(service.state, u.user_id, COURSE_TITLE)
        ),
        key=lambda uid: (len(uid), uid),
    )
    assert listed == expected
    assert set(listed) == set(enrolling.guides)


def test_no_eligible_users_gives_an_empty_list():
    net = Net(guide_count=0)
    net.approve_course()
    net.open_enrollment()
    rows = net.service.query(
        "candidate_guides", {"viewer_id": net.teacher, "course_id": net.course}
    )
    assert rows == []


def test_candidates_for_an_unknown_course(enrolling: Net):
    with pytest.raises(NotFoundError):
        enrolling.service.query(
            "candidate_guides", {"viewer_id": enrolling.novices[0], "course_id": "c-404"}
        )


def test_an_eligible_teacher_of_another_course_is_a_candidate(enrolling: Net):
    """Only the course's own teacher is excluded from its candidates."""
    service = enrolling.service
    doc = service.register(
        "Mezun Hoca", "pw", "alumni",
        {"prior_courses": [{"course_title": COURSE_TITLE, "letter_grade": "AA"}]},
    )
    rows = service.query(
        "candidate_guides",
        {"viewer_id": enrolling.teacher, "course_id": enrolling.course},
    )
    assert doc["user_id"] in [row["user_id"] for row in rows]


# -- selection --------------------------------------------------------------------


def test_selection_supersedes_the_other_open_invitations(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, enrolling.guides[:3])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], True)
    enrolling.service.respond_invitation(enrolling.guides[1], ids[1], True)
    enrolling.service.select_guide(novice, enrolling.course, ids[1])

    assert _status(enrolling, ids[0]) == "superseded"  # the other acceptance
    assert _status(enrolling, ids[1]) == "accepted"  # the chosen one
    assert _status(enrolling, ids[2]) == "superseded"  # still pending at selection
    match = enrolling.service.state.matches[match_key(enrolling.course, novice)]
    assert match.guide_id == enrolling.guides[1]


def test_a_second_selection_is_blocked(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, enrolling.guides[:2])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], True)
    enrolling.service.respond_invitation(enrolling.guides[1], ids[1], True)
    enrolling.service.select_guide(novice, enrolling.course, ids[0])
    with pytest.raises(AlreadyMatchedError) as exc:
        enrolling.service.select_guide(novice, enrolling.course, ids[1])
    assert exc.value.code == "already_matched"
    assert isinstance(exc.value, StateError)


def test_selecting_a_pending_invitation_fails(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, [enrolling.guides[0]])
    with pytest.raises(StateError):
        enrolling.service.select_guide(novice, enrolling.course, ids[0])


def test_selecting_a_declined_invitation_fails(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, [enrolling.guides[0]])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], False)
    with pytest.raises(StateError):
        enrolling.service.select_guide(novice, enrolling.course, ids[0])


def test_selecting_another_novices_invitation_fails(enrolling: Net):
    enrolling.enroll_all()
    first, second = enrolling.novices[:2]
    ids = _invite(enrolling, first, [enrolling.guides[0]])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], True)
    with pytest.raises(ValidationError):
        enrolling.service.select_guide(second, enrolling.course, ids[0])


def test_every_match_keeps_an_eligible_guide(active: Net):
    state = active.service.state
    for match in state.matches.values():
        assert oracles.oracle_guide_eligible(state, match.guide_id, COURSE_TITLE)


# -- activation -------------------------------------------------------------------


def test_course_activates_when_the_last_novice_matches(enrolling: Net):
    enrolling.enroll_all()
    for i, novice in enumerate(enrolling.novices):
        assert enrolling.service.course_doc(enrolling.course)["state"] != "active"
        invitation = _invite(enrolling, novice, [enrolling.guides[i]])[0]
        enrolling.service.respond_invitation(enrolling.guides[i], invitation, True)
        enrolling.service.select_guide(novice, enrolling.course, invitation)
    assert enrolling.service.course_doc(enrolling.course)["state"] == "active"


def test_enrollment_stays_open_during_matching(enrolling: Net):
    first, second = enrolling.novices[:2]
    enrolling.service.enroll(first, enrolling.course)
    invitation = _invite(enrolling, first, [enrolling.guides[0]])[0]
    assert enrolling.service.course_doc(enrolling.course)["state"] == "matching"
    enrolling.service.enroll(second, enrolling.course)  # latecomer joins
    assert second in enrolling.service.state.courses[enrolling.course].enrolled_novices
    # and the latecomer keeps the course out of Active until matched too
    enrolling.service.respond_invitation(enrolling.guides[0], invitation, True)
    enrolling.service.select_guide(first, enrolling.course, invitation)
    assert enrolling.service.course_doc(enrolling.course)["state"] == "matching"


def test_all_matched_is_vacuously_true_with_nobody_enrolled(enrolling: Net):
    course = enrolling.service.state.courses[enrolling.course]
    assert course.enrolled_novices == ()
    assert all_matched(enrolling.service.state, course) is True


def test_all_matched_tracks_the_oracle(active: Net):
    state = active.service.state
    course = state.courses[active.course]
    assert all_matched(state, course) == oracles.oracle_all_matched(state, active.course)


# -- enrollment guards ---------------------------------------------------------------


def test_double_enrollment_is_a_conflict(enrolling: Net):
    enrolling.service.enroll(enrolling.novices[0], enrolling.course)
    with pytest.raises(ConflictError):
        enrolling.service.enroll(enrolling.novices[0], enrolling.course)


def test_the_teacher_cannot_enroll(enrolling: Net):
    with pytest.raises((ConflictError, PermissionDeniedError)):
        enrolling.service.enroll(enrolling.teacher, enrolling.course)


def test_enrollment_requires_the_novice_role(enrolling: Net):
    with pytest.raises(PermissionDeniedError):
        enrolling.service.enroll(enrolling.admin, enrolling.course)


def test_enrollment_closes_with_the_term(enrolling: Net):
    enrolling.service.rollover_term(enrolling.admin)
    with pytest.raises(StateError):
        enrolling.service.enroll(enrolling.novices[0], enrolling.course)


def test_same_title_twice_in_one_term_is_blocked(enrolling: Net):
    service = enrolling.service
    # the Turkish uppercase of COURSE_TITLE (dotted i capitalizes to İ)
    shouted = "MEYVECİLİKTE BUDAMA VE ZEYTİNYAĞI ÜRETİMİ"
    doc = service.request_course(
        enrolling.teacher, shouted, "tekrar", service.today(), service.today()
    )
    service.decide_course(enrolling.admin, doc["course_id"], "approved")
    service.open_enrollment(enrolling.teacher, doc["course_id"])
    service.enroll(enrolling.novices[0], enrolling.course)
    with pytest.raises(ConflictError):
        service.enroll(enrolling.novices[0], doc["course_id"])


# -- dropping ---------------------------------------------------------------------


def test_teacher_drop_withdraws_open_invitations(enrolling: Net):
    enrolling.enroll_all()
    novice = enrolling.novices[0]
    ids = _invite(enrolling, novice, enrolling.guides[:2])
    enrolling.service.respond_invitation(enrolling.guides[0], ids[0], True)
    enrolling.service.drop_novice(enrolling.teacher, enrolling.course, novice)
    course = enrolling.service.state.courses[enrolling.course]
    assert novice not in course.enrolled_novices
    assert _status(enrolling, ids[0]) == "withdrawn"
    assert _status(enrolling, ids[1]) == "withdrawn"


def test_dropping_the_straggler_activates_the_course(enrolling: Net):
    enrolling.enroll_all()
    for novice, guide in zip(enrolling.novices[:2], enrolling.guides):
        invitation = _invite(enrolling, novice, [guide])[0]
        enrolling.service.respond_invitation(guide, invitation, True)
        enrolling.service.select_guide(novice, enrolling.course, invitation)
    assert enrolling.service.course_doc(enrolling.course)["state"] == "matching"
    enrolling.service.drop_novice(enrolling.teacher, enrolling.course, enrolling.novices[2])
    assert enrolling.service.course_doc(enrolling.course)["state"] == "active"


def test_dropping_the_only_novice_activates_an_empty_course(enrolling: Net):
    enrolling.service.enroll(enrolling.novices[0], enrolling.course)
    enrolling.service.drop_novice(enrolling.teacher, enrolling.course, enrolling.novices[0])
    doc = enrolling.service.course_doc(enrolling.course)
    assert doc["state"] == "active"
    assert doc["enrolled_novices"] == []


def test_a_matched_novice_cannot_be_dropped(enrolling: Net):
    enrolling.enroll_all()
    novice, guide = enrolling.novices[0], enrolling.guides[0]
    invitation = _invite(enrolling, novice, [guide])[0]
    enrolling.service.respond_invitation(guide, invitation, True)
    enrolling.service.select_guide(novice, enrolling.course, invitation)
    with pytest.raises(StateError) as exc:
        enrolling.service.drop_novice(enrolling.teacher, enrolling.course, novice)
    assert exc.value.code == "already_matched"


def test_nobody_is_dropped_from_a_settled_course(active: Net):
    with pytest.raises(StateError):
        active.service.drop_novice(active.teacher, active.course, active.novices[0])


def test_only_the_teacher_may_drop(enrolling: Net):
    enrolling.enroll_all()
    for actor in (enrolling.novices[0], enrolling.guides[0], enrolling.admin):
        with pytest.raises(PermissionDeniedError):
            enrolling.service.drop_novice(actor, enrolling.course, enrolling.novices[0])


def test_dropping_an_unenrolled_user_is_not_found(enrolling: Net):
    with pytest.raises(NotFoundError):
        enrolling.service.drop_novice(enrolling.teacher, enrolling.course, enrolling.novices[0])


# -- the exhaustive capstone ---------------------------------------------------------


def test_every_interleaving_on_a_4x4_instance_matches_the_reference():
    """Breadth-first over all protocol interleavings to depth 8: outcome,
    projected state, material-read gating, and all_matched must agree with
    the independent automaton on every edge."""
    result = refmodel.explore(novices=4, guides=4, depth=8)
    assert result.disagreements == []
    assert result.states > 40_000  # the walk really fanned out
    assert result.edges > 800_000


def test_randomized_walks_smoke():
    from .harness import run_walks

    stats = run_walks(60, seed=7)
    assert stats.violations == []
    assert stats.novice_cap_attempts > 0
    assert stats.guide_cap_attempts > 0
