"""Acceptance gate.

Each criterion below runs end to end at its stated tolerance and prints
one verdict line (`ACn PASS/FAIL — detail`) on the real stdout so the
gate is legible even inside a captured pytest run.

  AC1  scenario fidelity: the sixteen-step walkthrough under 10 s
  AC2  novice invitation cap over ≥1000 randomized sequences
  AC3  guide acceptance cap over the same sequences
  AC4  eligibility soundness of every match ever formed
  AC5  material-read gating vs a brute-force reference automaton
  AC6  no teacher grade precedes its guide evaluation (journal linter)
  AC7  grade-book averages vs exact rational recomputation (≤1e-9)
  AC8  byte-identical replay and crash-restart durability
  AC9  authorization matrix: duties allowed, the rest denied
"""

from __future__ import annotations

import json
import random
import shutil
import time
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import pytest
from click.testing import CliRunner

from knet.cli import main as kn
from knet.service import NetworkService
from knet.state import replay
from knet.store.journal import EventRecord, FileJournal
from knet.store.lint import lint_directory, lint_records

from . import oracles
from .conftest import START, Net
from .harness import WalkStats, run_walks
from .refmodel import explore
from .test_authz import DUTIES, FORBIDDEN
from .test_api import Web, expect_error

from knet.api.authz import ANY, MATRIX, ROLES, decide

WALK_SEQUENCES = 1000


def verdict(capfd, tag: str, ok: bool, detail: str) -> None:
    """One visible PASS/FAIL line per criterion, even under fd capture."""
    line = f"{tag} {'PASS' if ok else 'FAIL'} — {detail}"
    with capfd.disabled():
        print(line, flush=True)
    assert ok, line


# -- shared expensive artefacts (built once) ----------------------------------------------


@pytest.fixture(scope="session")
def scenario_run(tmp_path_factory) -> dict:
    data_dir = tmp_path_factory.mktemp("acceptance") / "veri"
    started = time.monotonic()
    result = CliRunner().invoke(
        kn, ["--data-dir", str(data_dir), "--seed", "2019", "scenario", "run", "--json"]
    )
    elapsed = time.monotonic() - started
    assert result.exit_code == 0, result.output
    return {"data_dir": data_dir, "report": json.loads(result.output), "elapsed": elapsed}


@pytest.fixture(scope="session")
def walk_stats() -> WalkStats:
    return run_walks(WALK_SEQUENCES)


# -- AC1: scenario fidelity ---------------------------------------------------------------


def test_ac1_the_full_walkthrough_completes_quickly(capfd, scenario_run: dict) -> None:
    report = scenario_run["report"]
    elapsed = scenario_run["elapsed"]
    steps = [s["step"] for s in report["steps"]]
    summary = report["summary"]
    ok = (
        steps == list(range(1, 17))
        and summary["course_state"] == "closed"
        and summary["graded_submissions"] == 6
        and summary["transcript_entries"] == 3
        and summary["portfolio_entries"] == 6
        and elapsed < 10.0
    )
    verdict(
        capfd,
        "AC1",
        ok,
        f"16/16 steps; course {summary['course_state']}; "
        f"{summary['graded_submissions']} graded, {summary['transcript_entries']} transcripts, "
        f"{summary['portfolio_entries']} portfolio entries; wall {elapsed:.2f}s < 10s",
    )


# -- AC2/AC3/AC4: the randomized harness -----------------------------------------------------


def test_ac2_no_novice_ever_exceeds_five_active_invitations(capfd, walk_stats: WalkStats) -> None:
    cap_violations = [v for v in walk_stats.violations if "active invitations" in v]
    ok = (
        walk_stats.sequences >= 1000
        and cap_violations == []
        and walk_stats.violations == []
        and walk_stats.novice_cap_attempts > 0
    )
    verdict(
        capfd,
        "AC2",
        ok,
        f"{walk_stats.sequences} sequences / {walk_stats.operations} ops; "
        f"{walk_stats.novice_cap_attempts} deliberate cap breaches all refused with "
        f"capacity errors; 0 violations",
    )


def test_ac3_no_guide_ever_exceeds_five_acceptances(capfd, walk_stats: WalkStats) -> None:
    cap_violations = [v for v in walk_stats.violations if "acceptances" in v]
    ok = cap_violations == [] and walk_stats.violations == [] and walk_stats.guide_cap_attempts > 0
    verdict(
        capfd,
        "AC3",
        ok,
        f"{walk_stats.guide_cap_attempts} sixth-acceptance attempts all refused; "
        f"0 violations across {walk_stats.sequences} sequences",
    )


def test_ac4_every_match_has_a_passing_guide(capfd, walk_stats: WalkStats) -> None:
    eligibility_violations = [v for v in walk_stats.violations if "not eligible" in v]
    ok = eligibility_violations == [] and walk_stats.violations == []
    verdict(
        capfd,
        "AC4",
        ok,
        f"eligibility re-derived from raw transcripts after every one of "
        f"{walk_stats.operations} ops; 0 violations",
    )


# -- AC5: the read gate against the reference automaton ---------------------------------------


def test_ac5_material_reads_agree_with_the_reference(capfd) -> None:
    totals = {"states": 0, "edges": 0, "probes": 0}
    disagreements: list[str] = []
    for novices, guides in ((1, 1), (2, 2), (3, 3)):
        result = explore(novices, guides, depth=8)
        totals["states"] += result.states
        totals["edges"] += result.edges
        totals["probes"] += result.read_probes
        disagreements.extend(f"{novices}x{guides}: {d}" for d in result.disagreements)
    ok = disagreements == [] and totals["states"] > 6000
    verdict(
        capfd,
        "AC5",
        ok,
        f"instances ≤3×≤3, depth 8: {totals['states']} states, {totals['edges']} edges, "
        f"{totals['probes']} read probes, 0 disagreements",
    )


# -- AC6: grade-after-evaluation ordering, by journal lint --------------------------------------


def test_ac6_no_grade_precedes_its_evaluation(capfd, scenario_run: dict, walk_stats: WalkStats) -> None:
    journal_problems = lint_directory(scenario_run["data_dir"])

    ts = datetime(2019, 4, 12, tzinfo=timezone.utc)
    planted = [
        EventRecord(1, ts, "u-1", "assignment_activated", {
            "assignment_id": "a-1",
            "submissions": [{"submission_id": "s-1", "novice_id": "u-2", "guide_id": "u-3"}],
        }),
        EventRecord(2, ts, "u-2", "work_submitted", {"submission_id": "s-1", "attachments": []}),
        EventRecord(3, ts, "u-1", "submission_graded",
                    {"submission_id": "s-1", "score": 90.0, "portfolio_entry_id": "p-1"}),
    ]
    caught = any("graded before any guide evaluation" in p for p in lint_records(planted))

    ok = journal_problems == [] and walk_stats.violations == [] and caught
    verdict(
        capfd,
        "AC6",
        ok,
        f"scenario journal clean; {walk_stats.journal_records} walker records linted clean "
        f"across {walk_stats.sequences} sequences; planted violation caught",
    )


# -- AC7: averages against exact rational arithmetic ---------------------------------------------


def test_ac7_grade_book_averages_match_exact_recomputation(capfd) -> None:
    rng = random.Random(20190415)
    worst = 0.0
    rows_checked = 0
    for novice_count in range(3, 11):
        for assignment_count in range(2, 6):
            net = Net(novice_count=novice_count, guide_count=2)
            net.approve_course()
            net.open_enrollment()
            net.enroll_all()
            pairs = net.match_all()
            service = net.service
            expected: dict[str, list[float]] = {n: [] for n in net.novices}
            for index in range(assignment_count):
                assignment = service.create_assignment(
                    net.teacher, net.course, f"Ödev {index + 1}",
                    START, START + timedelta(days=30),
                )
                activation = service.activate_assignment(
                    net.teacher, assignment["assignment_id"]
                )
                submission_of = {
                    s["novice_id"]: s["submission_id"] for s in activation["submissions"]
                }
                for novice in net.novices:
                    if rng.random() < 0.25:
                        continue  # this cell stays ungraded
                    service.submit_work(novice, submission_of[novice], [net.attachment])
                    service.guide_evaluate(
                        pairs[novice], submission_of[novice], "approve", ""
                    )
                    score = round(rng.uniform(0.0, 100.0), 4)
                    service.teacher_grade(net.teacher, submission_of[novice], score)
                    expected[novice].append(score)
            book = service.query(
                "grade_book", {"viewer_id": net.teacher, "course_id": net.course}
            )
            assert [row["novice_id"] for row in book] == net.novices
            for row in book:
                rows_checked += 1
                want = oracles.oracle_average(expected[row["novice_id"]])
                got = row["average"]
                if want is None or got is None:
                    assert want is None and got is None
                else:
                    worst = max(worst, abs(want - got))
    ok = worst <= 1e-9 and rows_checked >= 8 * 4 * 3
    verdict(
        capfd,
        "AC7",
        ok,
        f"grids 3×2 … 10×5: {rows_checked} grade rows, worst |Δ| = {worst:.2e} ≤ 1e-9",
    )


# -- AC8: replay determinism and crash durability --------------------------------------------------


def test_ac8_replay_is_byte_identical_and_crash_safe(capfd, scenario_run: dict, tmp_path: Path) -> None:
    data_dir = scenario_run["data_dir"]
    live = NetworkService.open_dir(data_dir)
    live_bytes = live.snapshot().canonical_bytes()
    head = live.head_seq
    live.close()

    journal = FileJournal(data_dir / "journal")
    from_disk = replay(list(journal.records())).canonical_bytes()
    journal.close()

    crash_dir = tmp_path / "kaza"
    shutil.copytree(data_dir, crash_dir)
    crashed = FileJournal(crash_dir / "journal")
    segments = crashed.segment_paths()
    crashed.close()
    with segments[-1].open("ab") as handle:
        handle.write(b'{"seq": 424242, "timestamp": "2019-04-21T0')  # power cut mid-write
    survivor = NetworkService.open_dir(crash_dir)
    restored = survivor.snapshot().canonical_bytes()
    survivor.register("Kaza Tanığı", "pw", "student", {})
    new_head = survivor.head_seq
    survivor.close()

    ok = from_disk == live_bytes and restored == live_bytes and new_head == head + 1
    verdict(
        capfd,
        "AC8",
        ok,
        f"{head} events replayed to an identical {len(live_bytes)}-byte snapshot; "
        f"torn tail dropped on restart, all acknowledged events intact, "
        f"next write landed at seq {head + 1}",
    )


# -- AC9: the authorization matrix ------------------------------------------------------------------


def test_ac9_duties_allowed_everything_else_denied(capfd, active: Net) -> None:
    allows = 0
    for role, actions in DUTIES.items():
        for action in actions:
            assert decide({role}, action), f"{role} must be allowed {action}"
            allows += 1

    complement = 0
    for action, granted in MATRIX.items():
        if ANY in granted:
            continue
        for role in ROLES - granted:
            assert decide({role}, action) is False
            complement += 1

    rng = random.Random(2019)
    fuzzed = 0
    for _ in range(500):
        subset = {role for role in sorted(ROLES) if rng.random() < 0.4}
        action = rng.choice(sorted(MATRIX))
        granted = MATRIX[action]
        assert decide(subset, action) is (ANY in granted or bool(granted & subset))
        fuzzed += 1

    web = Web(active)
    tokens = {
        "Çaylak 1": web.as_novice(),
        "Kılavuz 1": web.as_guide(0),
        "Öğretmen Hoca": web.as_teacher(),
        "admin": web.as_admin(),
    }
    before = web.service.head_seq
    denied = 0
    for label, name, method, path, body in FORBIDDEN:
        response = web.client.request(
            method, path.replace("{course}", web.net.course), headers=tokens[name], json=body
        )
        expect_error(response, 403, "permission_denied")
        denied += 1
    ok = allows >= 20 and denied >= 25 and web.service.head_seq == before
    verdict(
        capfd,
        "AC9",
        ok,
        f"{allows} role duties allowed; {denied} cross-role HTTP calls denied with 403; "
        f"{complement} complement pairs + {fuzzed} fuzzed role sets all deny-by-default; "
        f"0 journal writes from denied calls",
    )
