"""Named read-side views over materialized state.

`query` is the single dissemination entry point: every view is
read-only and answers from the state snapshot it is handed.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Callable

from ..canon import to_doc
from ..coursework import grade_book, list_materials, portfolio
from ..domain import Role
from ..errors import NotFoundError, PermissionDeniedError
from ..matching import course_matches, list_guide_candidates, require_course
from ..registration import require_user

if TYPE_CHECKING:
    from ..state import NetworkState


def _require_course_reader(state: "NetworkState", viewer_id: str, course_id: str):
    from ..matching import is_participant

    course = require_course(state, course_id)
    viewer = require_user(state, viewer_id)
    if not (
        viewer.has_role(Role.ADMIN)
        or viewer_id == course.teacher_id
        or is_participant(state, course, viewer_id)
    ):
        raise PermissionDeniedError(
            "this view is restricted to course participants", course_id=course_id
        )
    return course


def _view_portfolio(state: "NetworkState", params: dict[str, Any]) -> Any:
    return [to_doc(e) for e in portfolio(state, params["viewer_id"], params["owner_id"])]


def _view_grade_book(state: "NetworkState", params: dict[str, Any]) -> Any:
    return [to_doc(r) for r in grade_book(state, params["viewer_id"], params["course_id"])]


def _view_course_roster(state: "NetworkState", params: dict[str, Any]) -> Any:
    """Novices in enrollment order, then their guides: the membership of
    the learning cohort. The teacher runs the course rather than sitting
    in it, so a fresh course counts zero participants."""
    course = _require_course_reader(state, params["viewer_id"], params["course_id"])
    guide_of = {m.novice_id: m.guide_id for m in course_matches(state, course.course_id)}
    rows = []
    for novice_id in course.enrolled_novices:
        rows.append(
            {
                "user_id": novice_id,
                "display_name": state.users[novice_id].display_name,
                "course_role": "novice",
                "guide_id": guide_of.get(novice_id),
            }
        )
    seen: set[str] = set()
    for novice_id in course.enrolled_novices:
        guide_id = guide_of.get(novice_id)
        if guide_id is not None and guide_id not in seen:
            seen.add(guide_id)
            rows.append(
                {
                    "user_id": guide_id,
                    "display_name": state.users[guide_id].display_name,
                    "course_role": "guide",
                    "guide_id": None,
                }
            )
    return rows


def _view_candidate_guides(state: "NetworkState", params: dict[str, Any]) -> Any:
    course = _require_course_reader(state, params["viewer_id"], params["course_id"])
    return [
        {"user_id": user.user_id, "display_name": user.display_name}
        for user in list_guide_candidates(state, course)
    ]


def _view_open_questions(state: "NetworkState", params: dict[str, Any]) -> Any:
    from ..coursework import course_questions

    rows = course_questions(state, params["viewer_id"], params["course_id"])
    return [to_doc(q) for q in rows if q.answer is None]


def _view_materials(state: "NetworkState", params: dict[str, Any]) -> Any:
    return [to_doc(m) for m in list_materials(state, params["viewer_id"], params["course_id"])]


VIEWS: dict[str, Callable[["NetworkState", dict[str, Any]], Any]] = {
    "portfolio": _view_portfolio,
    "grade_book": _view_grade_book,
    "course_roster": _view_course_roster,
    "candidate_guides": _view_candidate_guides,
    "open_questions": _view_open_questions,
    "materials": _view_materials,
}


def query(state: "NetworkState", view: str, params: dict[str, Any]) -> Any:
    fn = VIEWS.get(view)
    if fn is None:
        raise NotFoundError(f"unknown view {view!r}", view=view)
    return fn(state, params)
