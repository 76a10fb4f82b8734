"""The sixteen-step course-cycle scenario, driven over the HTTP API.

One admin, one teacher, a configurable cohort of guides and novices,
and two assignments travel the whole workflow: intake, approvals,
enrollment, invitation matching, materials, the draft/evaluate/grade
loop (with one revision), closing, portfolios, and the term rollover.
The runner talks only to the API surface, records the journal sequence
range each step produced, and verifies the final tallies.
"""

from __future__ import annotations

import base64
import random
import time
from dataclasses import dataclass, field
from typing import Any, Callable

DEFAULT_COURSE_TITLE = "Meyvecilikte Budama ve Zeytinyağı Üretimi"
DEFAULT_COURSE_CONTENT = (
    "Meyve ağaçlarında budama teknikleri ve zeytinyağı üretim süreci: "
    "hasat, sıkım ve kalite değerlendirmesi."
)

GUIDE_NAMES = ["Ali Kaya", "Ayşe Tan", "Mehmet Demir", "Zeynep Arslan", "Emre Bulut", "Elif Yıldız"]
NOVICE_NAMES = ["Deniz Çelik", "Murat Özkan", "Seda Güneş"]
PASSING_LETTERS = ["AA", "BA", "BB", "CB", "CC"]

ASSIGNMENT_FIXTURES = [
    {"title": "ÖDEV 1", "start_date": "2019-04-12", "deadline": "2019-04-14"},
    {"title": "ÖDEV 2", "start_date": "2019-04-15", "deadline": "2019-04-21"},
]


class ScenarioError(Exception):
    """A step's API call failed; carries the step number and error code."""

    def __init__(self, step: int, message: str, code: str | None = None) -> None:
        super().__init__(f"step {step}: {message}" if step else message)
        self.step = step
        self.code = code


@dataclass
class StepReport:
    number: int
    title: str
    first_seq: int | None = None
    last_seq: int | None = None
    notes: list[str] = field(default_factory=list)

    def to_doc(self) -> dict[str, Any]:
        return {
            "step": self.number,
            "title": self.title,
            "first_seq": self.first_seq,
            "last_seq": self.last_seq,
            "notes": self.notes,
        }

    def line(self) -> str:
        if self.first_seq is None or self.last_seq is None or self.last_seq < self.first_seq:
            span = "—"
        else:
            span = f"{self.first_seq}-{self.last_seq}"
        return f"step {self.number:02d}  {self.title:<44s} seq {span}"


class ScenarioRunner:
    """Drives the scenario against any httpx-compatible client."""

    def __init__(
        self,
        http: Any,
        seed: int = 0,
        novices: int = 3,
        guides: int = 6,
        admin_name: str = "admin",
        admin_password: str = "admin",
        name_tag: str = "",
    ) -> None:
        self.http = http
        self.rng = random.Random(seed)
        self.seed = seed
        self.novice_count = novices
        self.guide_count = guides
        self.admin_name = admin_name
        self.admin_password = admin_password
        self.name_tag = name_tag
        self.step: int = 0
        self.tokens: dict[str, str] = {}
        self.reports: list[StepReport] = []
        # cast
        self.teacher: dict[str, Any] = {}
        self.guides: list[dict[str, Any]] = []
        self.novices: list[dict[str, Any]] = []
        self.course_id = ""
        self.selected_guide: dict[str, str] = {}  # novice user_id -> guide user_id
        self.invitations: dict[str, list[dict[str, Any]]] = {}
        self.graded: list[dict[str, Any]] = []
        self.baseline: dict[str, int] = {}

    # -- HTTP plumbing ---------------------------------------------------------

    def _check(self, response: Any, expect: int = 200) -> Any:
        if response.status_code >= 400:
            try:
                doc = response.json()
                err = doc.get("error", {})
                message = f"{err.get('code', response.status_code)}: {err.get('message', '')}"
                code = err.get("code")
            except Exception:
                message, code = f"HTTP {response.status_code}", None
            raise ScenarioError(self.step, message, code)
        if response.status_code == 204:
            return None
        return response.json()

    def post(self, who: str, path: str, json: dict | None = None) -> Any:
        headers = {"Authorization": f"Bearer {self.tokens[who]}"} if who else {}
        return self._check(self.http.post(path, json=json, headers=headers))

    def get(self, who: str, path: str) -> Any:
        headers = {"Authorization": f"Bearer {self.tokens[who]}"} if who else {}
        return self._check(self.http.get(path, headers=headers))

    def delete(self, who: str, path: str) -> Any:
        headers = {"Authorization": f"Bearer {self.tokens[who]}"} if who else {}
        return self._check(self.http.delete(path, headers=headers))

    def login(self, who: str, display_name: str, password: str) -> None:
        doc = self._check(
            self.http.post(
                "/api/sessions", json={"display_name": display_name, "password": password}
            )
        )
        self.tokens[who] = doc["token"]

    def register(self, display_name: str, password: str, role_intent: str, intake: dict) -> dict:
        return self._check(
            self.http.post(
                "/api/users",
                json={
                    "display_name": display_name,
                    "password": password,
                    "role_intent": role_intent,
                    "intake": intake,
                },
            )
        )

    def upload(self, who: str, filename: str, content: bytes, media_type: str = "text/plain") -> dict:
        return self.post(
            who,
            "/api/attachments",
            {
                "filename": filename,
                "media_type": media_type,
                "content_base64": base64.b64encode(content).decode("ascii"),
            },
        )

    def head_seq(self) -> int:
        return self.get("admin", "/api/admin/journal-head")["head_seq"]

    def set_today(self, day: str) -> None:
        self.post("admin", "/api/admin/clock", {"today": day})

    def _name(self, base: str) -> str:
        return f"{base}{self.name_tag}"

    # -- the sixteen steps --------------------------------------------------------

    def run(self) -> dict[str, Any]:
        started = time.monotonic()
        self.login("admin", self.admin_name, self.admin_password)
        self.baseline = {
            "graded": 0,
            "portfolio": 0,
            "transcripts": 0,
        }
        steps: list[tuple[str, Callable[[StepReport], None]]] = [
            ("cohort registers; admin approves the teacher", self.step_01),
            ("teacher requests the course", self.step_02),
            ("admin approves; enrollment opens", self.step_03),
            ("novices enrol and invite guide candidates", self.step_04),
            ("guides answer their invitations", self.step_05),
            ("each novice selects a guide", self.step_06),
            ("all matched: teacher shares materials", self.step_07),
            ("first assignment created and activated", self.step_08),
            ("novices draft and submit to their guides", self.step_09),
            ("guides evaluate; one work sent back and redone", self.step_10),
            ("approved work is forwarded to the teacher", self.step_11),
            ("teacher grades the first assignment", self.step_12),
            ("second assignment repeats the loop", self.step_13),
            ("teacher closes the course", self.step_14),
            ("portfolios browsed by owner and peers", self.step_15),
            ("term rolls over; eligibility refreshed", self.step_16),
        ]
        for number, (title, fn) in enumerate(steps, start=1):
            self.step = number
            report = StepReport(number=number, title=title)
            before = self.head_seq()
            fn(report)
            after = self.head_seq()
            report.first_seq = before + 1 if after > before else None
            report.last_seq = after if after > before else None
            self.reports.append(report)

        summary = self.verify_summary()
        summary["duration_s"] = round(time.monotonic() - started, 3)
        summary["seed"] = self.seed
        return {
            "steps": [r.to_doc() for r in self.reports],
            "summary": summary,
        }

    def step_01(self, report: StepReport) -> None:
        teacher_name = self._name("Büşra S")
        self.teacher = self.register(
            teacher_name,
            "hoca-parola",
            "teacher",
            {
                "university": "Kahramanmaraş Sütçü İmam Üniversitesi",
                "faculty": "Ziraat Fakültesi",
                "department": "Bahçe Bitkileri Bölümü",
                "teachable_courses": ["MEYVECİLİKTE BUDAMA", "YAĞ BİTKİLERİ"],
            },
        )
        self.login("teacher", teacher_name, "hoca-parola")
        for i in range(self.guide_count):
            base = GUIDE_NAMES[i] if i < len(GUIDE_NAMES) else f"Kılavuz {i + 1}"
            name = self._name(base)
            if i % 2 == 0:
                letter = PASSING_LETTERS[self.rng.randrange(len(PASSING_LETTERS))]
                user = self.register(
                    name,
                    "kilavuz-parola",
                    "alumni",
                    {"prior_courses": [{"course_title": DEFAULT_COURSE_TITLE, "letter_grade": letter}]},
                )
            else:
                score = self.rng.randint(73, 100)
                user = self.register(
                    name,
                    "kilavuz-parola",
                    "student",
                    {"prior_courses": [{"course_title": DEFAULT_COURSE_TITLE, "numeric_grade": score}]},
                )
            self.guides.append(user)
            self.login(user["user_id"], name, "kilavuz-parola")
        for i in range(self.novice_count):
            base = NOVICE_NAMES[i] if i < len(NOVICE_NAMES) else f"Çaylak {i + 1}"
            name = self._name(base)
            user = self.register(name, "caylak-parola", "student", {})
            self.novices.append(user)
            self.login(user["user_id"], name, "caylak-parola")
        queue = self.get("admin", "/api/admin/approvals")
        application_id = next(
            a["application_id"]
            for a in queue["teacher_applications"]
            if a["user_id"] == self.teacher["user_id"]
        )
        decided = self.post(
            "admin",
            "/api/admin/approvals",
            {"target": "teacher-application", "target_id": application_id, "decision": "approved"},
        )
        report.notes.append(
            f"registered 1 teacher, {self.guide_count} guides, {self.novice_count} novices; "
            f"application {decided['application_id']} approved"
        )

    def step_02(self, report: StepReport) -> None:
        course = self.post(
            "teacher",
            "/api/courses",
            {
                "title": DEFAULT_COURSE_TITLE,
                "content": DEFAULT_COURSE_CONTENT,
                "start_date": "2019-04-01",
                "end_date": "2019-06-30",
            },
        )
        self.course_id = course["course_id"]
        report.notes.append(f"course {self.course_id} requested ({course['state']})")

    def step_03(self, report: StepReport) -> None:
        self.post(
            "admin",
            "/api/admin/approvals",
            {"target": "course-request", "target_id": self.course_id, "decision": "approved"},
        )
        course = self.post("teacher", f"/api/courses/{self.course_id}/enrollment-opening")
        report.notes.append(f"course approved and {course['state']}")

    def step_04(self, report: StepReport) -> None:
        for novice in self.novices:
            self.post(novice["user_id"], f"/api/courses/{self.course_id}/enrollments", {})
        candidates = self.get(
            self.novices[0]["user_id"], f"/api/courses/{self.course_id}/guide-candidates"
        )
        # Candidates may include eligible users from earlier runs in the same
        # data directory; invitations stay within this run's cast so every
        # recipient holds a session and can answer in step 5.
        cast = {guide["user_id"] for guide in self.guides}
        candidate_ids = [c["user_id"] for c in candidates if c["user_id"] in cast]
        if not candidate_ids:
            raise ScenarioError(self.step, "no eligible guide candidates", code="not_eligible")
        for novice in self.novices:
            k = min(5, len(candidate_ids), self.rng.randint(2, 5))
            picks = self.rng.sample(candidate_ids, k)
            sent = self.post(
                novice["user_id"],
                f"/api/courses/{self.course_id}/invitations",
                {"guide_ids": picks},
            )
            self.invitations[novice["user_id"]] = sent
        total = sum(len(v) for v in self.invitations.values())
        report.notes.append(
            f"{len(candidates)} candidates listed; {total} invitations sent by "
            f"{self.novice_count} novices"
        )

    def step_05(self, report: StepReport) -> None:
        accepted = declined = 0
        for novice_id, sent in self.invitations.items():
            for index, invitation in enumerate(sent):
                if index == 0:
                    accept = True  # every novice must end up with a willing guide
                else:
                    accept = self.rng.random() < 0.5
                doc = self.post(
                    invitation["guide_id"],
                    f"/api/invitations/{invitation['invitation_id']}/response",
                    {"accept": accept},
                )
                invitation["status"] = doc["status"]
                accepted += 1 if accept else 0
                declined += 0 if accept else 1
        report.notes.append(f"{accepted} accepted, {declined} declined")

    def step_06(self, report: StepReport) -> None:
        course: dict[str, Any] = {}
        for novice in self.novices:
            options = [
                inv for inv in self.invitations[novice["user_id"]] if inv["status"] == "accepted"
            ]
            choice = self.rng.choice(options)
            result = self.post(
                novice["user_id"],
                f"/api/courses/{self.course_id}/guide-selection",
                {"invitation_id": choice["invitation_id"]},
            )
            self.selected_guide[novice["user_id"]] = choice["guide_id"]
            course = result["course"]
        report.notes.append(f"all matched; course is {course.get('state', '?')}")

    def step_07(self, report: StepReport) -> None:
        ref = self.upload(
            "teacher",
            "ders-notlari-hafta-1.txt",
            "Budama ilkeleri: şekil, verim ve gençleştirme budaması.".encode("utf-8"),
        )
        self.post(
            "teacher",
            f"/api/courses/{self.course_id}/materials",
            {"attachment": ref, "caption": "Hafta 1 ders notları"},
        )
        self.post(
            "teacher",
            f"/api/courses/{self.course_id}/announcements",
            {"body": "Ders materyalleri yüklendi; kılavuzunuzla birlikte inceleyiniz."},
        )
        materials = self.get(
            self.novices[0]["user_id"], f"/api/courses/{self.course_id}/materials"
        )
        report.notes.append(f"{len(materials)} material visible to novices; 1 announcement")

    def step_08(self, report: StepReport) -> None:
        self._run_assignment_setup(report, ASSIGNMENT_FIXTURES[0])

    def _run_assignment_setup(self, report: StepReport, fixture: dict[str, str]) -> None:
        assignment = self.post(
            "teacher",
            f"/api/courses/{self.course_id}/assignments",
            {
                "title": fixture["title"],
                "start_date": fixture["start_date"],
                "deadline": fixture["deadline"],
            },
        )
        activation = self.post(
            "teacher", f"/api/assignments/{assignment['assignment_id']}/activation"
        )
        self.current_assignment = activation["assignment"]
        self.current_submissions = {
            s["novice_id"]: s for s in activation["submissions"]
        }
        report.notes.append(
            f"{fixture['title']} {fixture['start_date']} → {fixture['deadline']}; "
            f"{len(activation['submissions'])} submissions opened"
        )

    def step_09(self, report: StepReport) -> None:
        self.set_today(self.current_assignment["start_date"])
        self._submit_all(report, revise_candidate=self.novices[0]["user_id"])

    def _submit_all(self, report: StepReport, revise_candidate: str | None = None) -> None:
        for novice in self.novices:
            submission = self.current_submissions[novice["user_id"]]
            content = (
                f"{self.current_assignment['title']} — {novice['display_name']} çalışması"
            ).encode("utf-8")
            ref = self.upload(novice["user_id"], "odev.txt", content)
            self.post(
                novice["user_id"],
                f"/api/submissions/{submission['submission_id']}/drafts",
                {"attachments": [ref]},
            )
            self.post(
                novice["user_id"],
                f"/api/submissions/{submission['submission_id']}/feedback",
                {"body": "Ödevimi gönderdim, görüşlerinizi bekliyorum."},
            )
        report.notes.append(f"{len(self.novices)} drafts submitted with feedback notes")

    def step_10(self, report: StepReport) -> None:
        revise_novice = self.novices[0]
        submission = self.current_submissions[revise_novice["user_id"]]
        guide_id = self.selected_guide[revise_novice["user_id"]]
        self.post(
            guide_id,
            f"/api/submissions/{submission['submission_id']}/guide-evaluation",
            {"verdict": "revise", "comments": "Budama dönemleri bölümünü genişletmelisin."},
        )
        content = f"{self.current_assignment['title']} — gözden geçirilmiş çalışma".encode("utf-8")
        ref = self.upload(revise_novice["user_id"], "odev-v2.txt", content)
        self.post(
            revise_novice["user_id"],
            f"/api/submissions/{submission['submission_id']}/drafts",
            {"attachments": [ref]},
        )
        for novice in self.novices:
            submission = self.current_submissions[novice["user_id"]]
            guide_id = self.selected_guide[novice["user_id"]]
            self.post(
                guide_id,
                f"/api/submissions/{submission['submission_id']}/guide-evaluation",
                {"verdict": "approve", "comments": "Eline sağlık, öğretmene iletiyorum."},
            )
        report.notes.append("one revision requested and redone; all drafts approved")

    def step_11(self, report: StepReport) -> None:
        forwarded = 0
        for novice in self.novices:
            submission = self.get(
                novice["user_id"],
                f"/api/submissions/{self.current_submissions[novice['user_id']]['submission_id']}",
            )
            if submission["state"] == "forwarded_to_teacher":
                forwarded += 1
        if forwarded != len(self.novices):
            raise ScenarioError(self.step, f"only {forwarded} submissions forwarded")
        report.notes.append(
            f"{forwarded}/{len(self.novices)} forwarded (approval forwards in the same event)"
        )

    def step_12(self, report: StepReport) -> None:
        self._grade_all(report)

    def _grade_all(self, report: StepReport) -> None:
        for novice in self.novices:
            submission = self.current_submissions[novice["user_id"]]
            score = self.rng.randint(65, 100)
            doc = self.post(
                "teacher",
                f"/api/submissions/{submission['submission_id']}/teacher-grade",
                {"score": score},
            )
            self.graded.append(doc)
        report.notes.append(
            f"{len(self.novices)} graded ({self.current_assignment['title']})"
        )

    def step_13(self, report: StepReport) -> None:
        self._run_assignment_setup(report, ASSIGNMENT_FIXTURES[1])
        self.set_today(self.current_assignment["start_date"])
        self._submit_all(report)
        for novice in self.novices:
            submission = self.current_submissions[novice["user_id"]]
            guide_id = self.selected_guide[novice["user_id"]]
            self.post(
                guide_id,
                f"/api/submissions/{submission['submission_id']}/guide-evaluation",
                {"verdict": "approve", "comments": "Bu sefer ilk denemede olmuş."},
            )
        self._grade_all(report)

    def step_14(self, report: StepReport) -> None:
        closure = self.post("teacher", f"/api/courses/{self.course_id}/closure")
        grades = ", ".join(
            f"{g['novice_id']}={g['numeric_grade']:.1f}({g['letter_grade']})"
            for g in closure["final_grades"]
        )
        report.notes.append(f"course {closure['course']['state']}; finals: {grades}")

    def step_15(self, report: StepReport) -> None:
        own = self.get(
            self.novices[0]["user_id"],
            f"/api/users/{self.novices[0]['user_id']}/portfolio",
        )
        peer_viewer = self.novices[1]["user_id"] if len(self.novices) > 1 else "teacher"
        peer = self.get(peer_viewer, f"/api/users/{self.novices[0]['user_id']}/portfolio")
        if [e["entry_id"] for e in own] != [e["entry_id"] for e in peer]:
            raise ScenarioError(self.step, "peer portfolio view differs from owner view")
        total = 0
        for novice in self.novices:
            entries = self.get("teacher", f"/api/users/{novice['user_id']}/portfolio")
            total += len(entries)
        report.notes.append(f"{total} portfolio entries across the cohort")

    def step_16(self, report: StepReport) -> None:
        rolled = self.post("admin", "/api/admin/term-rollovers")
        probe = self.post(
            "teacher",
            "/api/courses",
            {
                "title": DEFAULT_COURSE_TITLE,
                "content": "Yeni dönem tekrarı.",
                "start_date": "2019-09-01",
                "end_date": "2019-12-20",
            },
        )
        self.post(
            "admin",
            "/api/admin/approvals",
            {"target": "course-request", "target_id": probe["course_id"], "decision": "approved"},
        )
        candidates = self.get("teacher", f"/api/courses/{probe['course_id']}/guide-candidates")
        candidate_ids = {c["user_id"] for c in candidates}
        eligible_novices = [n for n in self.novices if n["user_id"] in candidate_ids]
        report.notes.append(
            f"term {rolled['closed_term_id']} closed, {rolled['open_term']['term_id']} opened; "
            f"{len(eligible_novices)}/{self.novice_count} novices now guide-eligible"
        )

    # -- final verification ----------------------------------------------------------

    def verify_summary(self) -> dict[str, Any]:
        course = self.get("teacher", f"/api/courses/{self.course_id}")
        graded = 0
        for assignment_doc in self.get("teacher", f"/api/courses/{self.course_id}/assignments"):
            for submission in self.get(
                "teacher", f"/api/assignments/{assignment_doc['assignment_id']}/submissions"
            ):
                if submission["state"] == "graded":
                    graded += 1
        transcript_entries = 0
        portfolio_entries = 0
        for novice in self.novices:
            user = self.get("admin", f"/api/users/{novice['user_id']}")
            transcript_entries += sum(
                1 for e in user["transcript"] if e["term_id"] == course["term_id"]
            )
            portfolio_entries += len(
                self.get("admin", f"/api/users/{novice['user_id']}/portfolio")
            )
        return {
            "course_id": self.course_id,
            "course_state": course["state"],
            "graded_submissions": graded,
            "transcript_entries": transcript_entries,
            "portfolio_entries": portfolio_entries,
            "head_seq": self.head_seq(),
        }
