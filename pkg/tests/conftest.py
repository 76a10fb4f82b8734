"""Shared fixtures: prebuilt networks at the interesting workflow stages.

Session-scoped templates are built once and forked per test, so even
the fully-matched active course costs microseconds per use.
"""

from __future__ import annotations

from datetime import date, timedelta

import pytest

from knet.service import NetworkService

COURSE_TITLE = "Meyvecilikte Budama ve Zeytinyağı Üretimi"
START = date(2019, 4, 1)


class Net:
    """A service plus the ids of a standard cast."""

    def __init__(
        self,
        novice_count: int = 3,
        guide_count: int = 6,
        service: NetworkService | None = None,
    ) -> None:
        self.service = service or NetworkService.in_memory(sim_date=START)
        self.admin = self.service.find_user_id("admin")
        teacher = self.service.register(
            "Öğretmen Hoca", "pw", "teacher", {"teachable_courses": [COURSE_TITLE]}
        )
        self.teacher = teacher["user_id"]
        application_id = self.service.pending_approvals(self.admin)["teacher_applications"][0][
            "application_id"
        ]
        self.service.decide_application(self.admin, application_id, "approved")
        self.guides: list[str] = []
        for i in range(guide_count):
            doc = self.service.register(
                f"Kılavuz {i + 1}",
                "pw",
                "alumni" if i % 2 == 0 else "student",
                {
                    "prior_courses": [
                        {"course_title": COURSE_TITLE, "letter_grade": "BA"}
                        if i % 2 == 0
                        else {"course_title": COURSE_TITLE, "numeric_grade": 78}
                    ]
                },
            )
            self.guides.append(doc["user_id"])
        self.novices: list[str] = []
        for i in range(novice_count):
            doc = self.service.register(f"Çaylak {i + 1}", "pw", "student", {})
            self.novices.append(doc["user_id"])
        course = self.service.request_course(
            self.teacher, COURSE_TITLE, "içerik", START, START + timedelta(days=90)
        )
        self.course = course["course_id"]
        self.attachment = self.service.attachments.put(
            "içerik".encode("utf-8"), "dosya.txt", "text/plain"
        )

    def approve_course(self) -> None:
        self.service.decide_course(self.admin, self.course, "approved")

    def open_enrollment(self) -> None:
        self.service.open_enrollment(self.teacher, self.course)

    def enroll_all(self) -> None:
        for novice in self.novices:
            self.service.enroll(novice, self.course)

    def match_all(self) -> dict[str, str]:
        """One distinct guide per novice; returns novice -> guide."""
        chosen: dict[str, str] = {}
        for i, novice in enumerate(self.novices):
            guide = self.guides[i % len(self.guides)]
            sent = self.service.send_invitations(novice, self.course, [guide])
            invitation_id = sent[0]["invitation_id"]
            self.service.respond_invitation(guide, invitation_id, True)
            self.service.select_guide(novice, self.course, invitation_id)
            chosen[novice] = guide
        return chosen

    def fork(self) -> "Net":
        twin = object.__new__(Net)
        twin.__dict__.update(self.__dict__)
        twin.service = self.service.fork()
        return twin


@pytest.fixture(scope="session")
def enrolling_template() -> Net:
    net = Net()
    net.approve_course()
    net.open_enrollment()
    return net


@pytest.fixture(scope="session")
def active_template(enrolling_template: Net) -> Net:
    net = enrolling_template.fork()
    net.enroll_all()
    net.pairs = net.match_all()  # type: ignore[attr-defined]
    return net


@pytest.fixture()
def enrolling(enrolling_template: Net) -> Net:
    return enrolling_template.fork()


@pytest.fixture()
def active(active_template: Net) -> Net:
    return active_template.fork()
