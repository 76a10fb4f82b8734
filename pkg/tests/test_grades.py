"""Grade bands, eligibility, and the course lifecycle machine, checked
against independent oracles and a brute-force reference automaton."""

from __future__ import annotations

import itertools
import random
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from knet.domain import (
    LETTER_ORDER,
    PASSING_LETTER,
    Course,
    CourseState,
    LetterGrade,
    LifecycleEvent,
    Role,
    TranscriptEntry,
    UserAccount,
    is_guide_eligible,
    letter_lower_bound,
    letter_rank,
    map_score_to_letter,
    normalize_course_title,
    transition_course,
)
from knet.errors import TransitionError, ValidationError

from .oracles import ORACLE_LETTERS, oracle_letter, oracle_normalize_title, oracle_passing

# -- the band table -------------------------------------------------------------------


def test_every_integer_score_matches_the_oracle_table():
    for score in range(0, 101):
        assert map_score_to_letter(score).value == oracle_letter(score), score


def test_declared_band_edges():
    assert map_score_to_letter(100) is LetterGrade.AA
    assert map_score_to_letter(0) is LetterGrade.FF
    assert map_score_to_letter(74) is LetterGrade.CB
    assert map_score_to_letter(90) is LetterGrade.AA
    assert map_score_to_letter(89.999) is LetterGrade.BA
    assert map_score_to_letter(65) is LetterGrade.CC
    assert map_score_to_letter(64.999) is LetterGrade.DC
    assert map_score_to_letter(39.999) is LetterGrade.FF
    assert map_score_to_letter(40) is LetterGrade.FD


@pytest.mark.parametrize("score", [-1, -0.001, 100.001, 101, 1000])
def test_out_of_range_scores_are_rejected(score):
    with pytest.raises(ValidationError):
        map_score_to_letter(score)


@given(
    st.floats(min_value=0, max_value=100, allow_nan=False),
    st.floats(min_value=0, max_value=100, allow_nan=False),
)
def test_letter_mapping_is_monotone(a, b):
    if a > b:
        a, b = b, a
    assert letter_rank(map_score_to_letter(a)) <= letter_rank(map_score_to_letter(b))


def test_letter_order_runs_worst_to_best():
    assert [letter.value for letter in LETTER_ORDER] == ORACLE_LETTERS
    assert PASSING_LETTER is LetterGrade.CC


def test_letter_lower_bound_maps_back_to_the_same_letter():
    for letter in LETTER_ORDER:
        assert map_score_to_letter(letter_lower_bound(letter)) is letter


# -- title normalization ----------------------------------------------------------------


@pytest.mark.parametrize(
    "raw",
    [
        "Meyvecilikte Budama",
        "  Meyvecilikte   Budama  ",
        "MEYVECİLİKTE BUDAMA",
        "meyvecilikte\tbudama",
    ],
)
def test_title_normalization_collapses_case_and_whitespace(raw):
    assert normalize_course_title(raw) == oracle_normalize_title(raw)


def test_distinct_titles_stay_distinct():
    assert normalize_course_title("Yağ Bitkileri") != normalize_course_title("Budama")


# -- eligibility ---------------------------------------------------------------------


def _user(roles: set[Role], entries: list[tuple[str, float]]) -> UserAccount:
    transcript = tuple(
        TranscriptEntry(title, "t-0", map_score_to_letter(score), float(score))
        for title, score in entries
    )
    return UserAccount("u-x", "x", "digest", frozenset(roles), transcript=transcript)


def test_passing_alumni_guide_is_eligible():
    user = _user({Role.GUIDE_ALUMNI}, [("Meyvecilikte Budama", 95)])
    assert is_guide_eligible(user, "Meyvecilikte Budama")
    assert is_guide_eligible(user, "MEYVECİLİKTE   BUDAMA".strip())


def test_no_transcript_entry_means_not_eligible():
    user = _user({Role.GUIDE_STUDENT}, [("Başka Ders", 95)])
    assert not is_guide_eligible(user, "Meyvecilikte Budama")


def test_failing_grade_means_not_eligible():
    user = _user({Role.GUIDE_ALUMNI}, [("Meyvecilikte Budama", 30)])
    assert not is_guide_eligible(user, "Meyvecilikte Budama")


def test_guide_role_is_required_even_with_a_passing_entry():
    user = _user({Role.NOVICE}, [("Meyvecilikte Budama", 95)])
    assert not is_guide_eligible(user, "Meyvecilikte Budama")


def test_eligibility_over_randomized_population():
    """One hundred synthetic transcripts re-checked by the oracle."""
    rng = random.Random(2019)
    titles = ["Budama", "Yağ Bitkileri", "Sebzecilik", "Toprak Bilgisi"]
    role_choices = [
        {Role.GUIDE_ALUMNI},
        {Role.GUIDE_STUDENT},
        {Role.NOVICE},
        {Role.TEACHER},
        set(),
    ]
    for _ in range(100):
        roles = rng.choice(role_choices)
        entries = [
            (rng.choice(titles), rng.randint(0, 100)) for _ in range(rng.randint(0, 4))
        ]
        # one entry per distinct title: duplicates are rejected elsewhere
        unique: dict[str, float] = {}
        for title, score in entries:
            unique.setdefault(title, score)
        user = _user(roles, list(unique.items()))
        target = rng.choice(titles)
        expected = bool(roles & {Role.GUIDE_ALUMNI, Role.GUIDE_STUDENT}) and any(
            oracle_normalize_title(t) == oracle_normalize_title(target)
            and oracle_passing(oracle_letter(score))
            for t, score in unique.items()
        )
        assert is_guide_eligible(user, target) == expected


@settings(max_examples=200)
@given(
    score=st.integers(min_value=0, max_value=100),
    other_score=st.integers(min_value=0, max_value=100),
)
def test_eligibility_is_stable_under_irrelevant_additions(score, other_score):
    base = _user({Role.GUIDE_ALUMNI}, [("Budama", score)])
    extended = _user(
        {Role.GUIDE_ALUMNI}, [("Budama", score), ("Bambaşka Bir Ders", other_score)]
    )
    assert is_guide_eligible(base, "Budama") == is_guide_eligible(extended, "Budama")


def test_transcript_entry_letter_must_agree_with_score():
    with pytest.raises(ValidationError):
        TranscriptEntry("Budama", "t-0", LetterGrade.AA, 12.0)


def test_duplicate_transcript_titles_per_term_are_rejected():
    user = _user({Role.GUIDE_ALUMNI}, [("Budama", 80)])
    entry = TranscriptEntry("BUDAMA", "t-0", LetterGrade.AA, 95.0)
    with pytest.raises(ValidationError):
        user.with_transcript_entry(entry)


def test_conflicting_guide_roles_are_rejected():
    with pytest.raises(ValidationError):
        _user({Role.GUIDE_ALUMNI, Role.GUIDE_STUDENT}, [])


# -- lifecycle: reference automaton over every sequence of length <= 6 ---------------------

REFERENCE_GRAPH = {
    ("requested", "approve"): "approved",
    ("approved", "open_enrollment"): "enrolling",
    ("enrolling", "all_matched"): "active",
    ("matching", "all_matched"): "active",
    ("active", "close"): "closed",
}


def _fresh_course() -> Course:
    return Course(
        "c-x", "Budama", "içerik", "u-t", "t-1", date(2019, 4, 1), date(2019, 6, 30)
    )


def test_lifecycle_agrees_with_reference_on_all_sequences_up_to_six():
    events = list(LifecycleEvent)
    checked = 0
    for length in range(0, 7):
        for sequence in itertools.product(events, repeat=length):
            course = _fresh_course()
            expected = "requested"
            for event in sequence:
                successor = REFERENCE_GRAPH.get((expected, event.value))
                if successor is None:
                    with pytest.raises(TransitionError):
                        transition_course(course, event)
                    break
                course = transition_course(course, event)
                expected = successor
                assert course.state.value == expected
            checked += 1
    assert checked == sum(len(events) ** n for n in range(0, 7))


def test_transition_error_names_state_and_event():
    with pytest.raises(TransitionError) as err:
        transition_course(_fresh_course(), LifecycleEvent.CLOSE)
    assert "requested" in str(err.value)
    assert "close" in str(err.value)


def test_transitions_change_nothing_but_state():
    course = _fresh_course()
    approved = transition_course(course, LifecycleEvent.APPROVE)
    assert approved.state is CourseState.APPROVED
    assert (approved.title, approved.teacher_id, approved.term_id) == (
        course.title,
        course.teacher_id,
        course.term_id,
    )
