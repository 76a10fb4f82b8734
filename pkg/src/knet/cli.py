"""`kn` — command-line client for the knowledge network.

Every command works against a data directory (embedded service) or, for
the scenario runner, optionally against a live server.  Exit codes:

* 0 — success
* 2 — validation problem (bad arguments, malformed payloads)
* 3 — state or gating problem (workflow refused the action)
* 4 — I/O problem (storage, unreadable journal, filesystem errors)
"""

from __future__ import annotations

import base64
import json
import shutil
import sys
from datetime import date
from pathlib import Path
from typing import Any

import click

from .canon import canonical_line
from .errors import KnetError, SchemaError, StateError, StorageError, ValidationError
from .scenario import ScenarioError, ScenarioRunner
from .service import NetworkService
from .store.journal import FileJournal

EXIT_VALIDATION = 2
EXIT_STATE = 3
EXIT_IO = 4

_CODE_EXITS = {
    "validation_error": EXIT_VALIDATION,
    "schema_error": EXIT_VALIDATION,
    "io_error": EXIT_IO,
    "integrity_error": EXIT_IO,
}


def _exit_for(error: Exception) -> int:
    if isinstance(error, (ValidationError, SchemaError)):
        return EXIT_VALIDATION
    if isinstance(error, StorageError):
        return EXIT_IO
    if isinstance(error, OSError):
        return EXIT_IO
    if isinstance(error, ScenarioError):
        return _CODE_EXITS.get(error.code or "", EXIT_STATE)
    if isinstance(error, KnetError):
        return EXIT_STATE
    return 1


def _fail(error: Exception) -> None:
    click.echo(f"error: {error}", err=True)
    raise SystemExit(_exit_for(error))


def _emit(doc: Any, as_json: bool, human: str | None = None) -> None:
    if as_json:
        click.echo(json.dumps(doc, indent=2, ensure_ascii=False, default=str))
    elif human is not None:
        click.echo(human)


class EmbeddedClient:
    """httpx-compatible facade over an in-process app, so the scenario
    runner and the CLI verbs use the same HTTP surface as remote mode."""

    def __init__(self, data_dir: Path, sim_date: date | None = None) -> None:
        from fastapi.testclient import TestClient

        from .api import create_app

        self.service = NetworkService.open_dir(data_dir, sim_date=sim_date)
        self.client = TestClient(create_app(self.service), raise_server_exceptions=False)

    def post(self, path: str, **kwargs: Any) -> Any:
        return self.client.post(path, **kwargs)

    def get(self, path: str, **kwargs: Any) -> Any:
        return self.client.get(path, **kwargs)

    def delete(self, path: str, **kwargs: Any) -> Any:
        return self.client.delete(path, **kwargs)


def _admin_token(client: Any, name: str, password: str) -> str:
    response = client.post("/api/sessions", json={"display_name": name, "password": password})
    if response.status_code >= 400:
        raise ValidationError(f"admin sign-in failed ({name}): HTTP {response.status_code}")
    return response.json()["token"]


def _call(client: Any, token: str, method: str, path: str, json_body: dict | None = None) -> Any:
    headers = {"Authorization": f"Bearer {token}"}
    kwargs: dict[str, Any] = {"headers": headers}
    if method != "get":
        kwargs["json"] = json_body
    response = getattr(client, method)(path, **kwargs)
    if response.status_code >= 400:
        doc = response.json()
        err = doc.get("error", {})
        raise ScenarioError(0, f"{err.get('code')}: {err.get('message')}", code=err.get("code"))
    return response.json() if response.status_code != 204 else None


@click.group(help=__doc__)
@click.option(
    "--data-dir",
    envvar="KN_DATA_DIR",
    default="./knet-data",
    show_default=True,
    type=click.Path(path_type=Path),
    help="Directory holding the journal and attachments.",
)
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed for generated fixtures.")
@click.option("--admin-name", default="admin", show_default=True)
@click.option("--admin-password", default="admin", show_default=True)
@click.pass_context
def main(ctx: click.Context, data_dir: Path, seed: int, admin_name: str, admin_password: str) -> None:
    ctx.ensure_object(dict)
    ctx.obj.update(
        data_dir=data_dir, seed=seed, admin_name=admin_name, admin_password=admin_password
    )


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--sim-date", type=click.DateTime(formats=["%Y-%m-%d"]), default=None,
              help="Start with a simulated calendar instead of the wall clock.")
@click.option("--static-dir", type=click.Path(path_type=Path), default=None,
              help="Serve a built web UI from this directory.")
@click.pass_context
def serve(ctx: click.Context, host: str, port: int, sim_date: Any, static_dir: Path | None) -> None:
    """Run the HTTP service over the data directory."""
    import uvicorn

    from .api import create_app

    try:
        service = NetworkService.open_dir(
            ctx.obj["data_dir"],
            sim_date=sim_date.date() if sim_date else None,
            admin_name=ctx.obj["admin_name"],
            admin_password=ctx.obj["admin_password"],
        )
    except (KnetError, OSError) as error:
        _fail(error)
        return
    app = create_app(service, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--force", is_flag=True, help="Seed even if the data directory already has history.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def seed(ctx: click.Context, force: bool, as_json: bool) -> None:
    """Create a small demo fixture: an approved teacher, an enrollable
    course, two eligible guides, and two novices (all passwords `demo`)."""
    from .scenario import DEFAULT_COURSE_TITLE

    try:
        embedded = EmbeddedClient(ctx.obj["data_dir"], sim_date=date(2019, 4, 1))
        if embedded.service.head_seq > 1 and not force:
            raise StateError(
                "data directory already has history; pass --force to seed anyway"
            )
        client = embedded.client
        token = _admin_token(client, ctx.obj["admin_name"], ctx.obj["admin_password"])
        tag = f" d{embedded.service.head_seq}" if embedded.service.head_seq > 1 else ""

        def register(name: str, intent: str, intake: dict) -> dict:
            response = client.post(
                "/api/users",
                json={
                    "display_name": name + tag,
                    "password": "demo",
                    "role_intent": intent,
                    "intake": intake,
                },
            )
            if response.status_code >= 400:
                err = response.json()["error"]
                raise ScenarioError(0, f"{err['code']}: {err['message']}", code=err["code"])
            return response.json()

        teacher = register(
            "Büşra S",
            "teacher",
            {
                "university": "Kahramanmaraş Sütçü İmam Üniversitesi",
                "faculty": "Ziraat Fakültesi",
                "department": "Bahçe Bitkileri Bölümü",
                "teachable_courses": ["MEYVECİLİKTE BUDAMA", "YAĞ BİTKİLERİ"],
            },
        )
        register("Ali Kaya", "alumni",
                 {"prior_courses": [{"course_title": DEFAULT_COURSE_TITLE, "letter_grade": "AA"}]})
        register("Ayşe Tan", "student",
                 {"prior_courses": [{"course_title": DEFAULT_COURSE_TITLE, "numeric_grade": 88}]})
        register("Deniz Çelik", "student", {})
        register("Murat Özkan", "student", {})
        queue = _call(client, token, "get", "/api/admin/approvals")
        application_id = next(
            a["application_id"]
            for a in queue["teacher_applications"]
            if a["user_id"] == teacher["user_id"]
        )
        _call(client, token, "post", "/api/admin/approvals",
              {"target": "teacher-application", "target_id": application_id, "decision": "approved"})
        response = client.post(
            "/api/sessions", json={"display_name": teacher["display_name"], "password": "demo"}
        )
        teacher_token = response.json()["token"]
        course = _call(client, teacher_token, "post", "/api/courses", {
            "title": DEFAULT_COURSE_TITLE,
            "content": "Demo dönemi için örnek ders.",
            "start_date": "2019-04-01",
            "end_date": "2019-06-30",
        })
        _call(client, token, "post", "/api/admin/approvals",
              {"target": "course-request", "target_id": course["course_id"], "decision": "approved"})
        opened = _call(client, teacher_token, "post",
                       f"/api/courses/{course['course_id']}/enrollment-opening")
        doc = {
            "course_id": course["course_id"],
            "course_state": opened["state"],
            "head_seq": embedded.service.head_seq,
        }
        _emit(doc, as_json, f"seeded demo fixture: course {course['course_id']} is {opened['state']}")
    except (KnetError, ScenarioError, OSError) as error:
        _fail(error)


@main.group()
def scenario() -> None:
    """Run scripted walkthroughs of the full course cycle."""


@scenario.command("run")
@click.option("--novices", default=3, show_default=True, type=int)
@click.option("--guides", default=6, show_default=True, type=int)
@click.option("--base-url", default=None, help="Drive a live server instead of the data directory.")
@click.option("--force", is_flag=True, help="Run even if the data directory already has history.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
@click.pass_context
def scenario_run(
    ctx: click.Context,
    novices: int,
    guides: int,
    base_url: str | None,
    force: bool,
    as_json: bool,
) -> None:
    """Execute the sixteen-step course cycle end to end."""
    name_tag = ""
    report_path: Path | None = None
    try:
        if base_url:
            import httpx

            http: Any = httpx.Client(base_url=base_url, timeout=30.0)
        else:
            embedded = EmbeddedClient(ctx.obj["data_dir"], sim_date=date(2019, 4, 1))
            if embedded.service.head_seq > 1:
                if not force:
                    raise StateError(
                        "data directory already has history; pass --force to run anyway"
                    )
                name_tag = f" r{embedded.service.head_seq}"
            http = embedded.client
            report_path = Path(ctx.obj["data_dir"]) / "scenario-report.json"
        runner = ScenarioRunner(
            http,
            seed=ctx.obj["seed"],
            novices=novices,
            guides=guides,
            admin_name=ctx.obj["admin_name"],
            admin_password=ctx.obj["admin_password"],
            name_tag=name_tag,
        )
        report = runner.run()
    except (KnetError, ScenarioError, OSError) as error:
        _fail(error)
        return
    if report_path is not None:
        report_path.write_text(
            json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
    if as_json:
        click.echo(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        for step_doc in report["steps"]:
            span = (
                f"{step_doc['first_seq']}-{step_doc['last_seq']}"
                if step_doc["first_seq"] is not None
                else "—"
            )
            click.echo(f"step {step_doc['step']:02d}  {step_doc['title']:<46s} seq {span}")
            for note in step_doc["notes"]:
                click.echo(f"         {note}")
        summary = report["summary"]
        click.echo(
            f"summary  course {summary['course_id']} {summary['course_state']}; "
            f"{summary['graded_submissions']} graded submissions; "
            f"{summary['transcript_entries']} transcript entries; "
            f"{summary['portfolio_entries']} portfolio entries; "
            f"head seq {summary['head_seq']}; {summary['duration_s']}s"
        )
        click.echo("step 16 complete")


@main.group()
def term() -> None:
    """Term administration."""


@term.command("rollover")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def term_rollover(ctx: click.Context, as_json: bool) -> None:
    """Close the open term and open the next one (refused while any
    course is still active)."""
    try:
        embedded = EmbeddedClient(ctx.obj["data_dir"])
        token = _admin_token(embedded.client, ctx.obj["admin_name"], ctx.obj["admin_password"])
        doc = _call(embedded.client, token, "post", "/api/admin/term-rollovers")
    except (KnetError, ScenarioError, OSError) as error:
        _fail(error)
        return
    _emit(
        doc,
        as_json,
        f"closed {doc['closed_term_id']}; opened {doc['open_term']['term_id']} "
        f"({doc['open_term']['label']})",
    )


@main.group()
def export() -> None:
    """Write service data to local files."""


@export.command("portfolio")
@click.argument("user")
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="Target directory for the archive.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def export_portfolio(ctx: click.Context, user: str, out: Path, as_json: bool) -> None:
    """Export a user's portfolio: manifest plus every graded attachment.

    USER may be a user id (`u-4`) or an exact display name."""
    try:
        embedded = EmbeddedClient(ctx.obj["data_dir"])
        token = _admin_token(embedded.client, ctx.obj["admin_name"], ctx.obj["admin_password"])
        user_id = user if user in {
            u["user_id"] for u in _call(embedded.client, token, "get", "/api/users")
        } else embedded.service.find_user_id(user)
        if user_id is None:
            raise ValidationError(f"no such user: {user!r}")
        entries = _call(embedded.client, token, "get", f"/api/users/{user_id}/portfolio")
        out.mkdir(parents=True, exist_ok=True)
        blob_dir = out / "attachments"
        blob_dir.mkdir(exist_ok=True)
        copied = 0
        for entry in entries:
            for ref in entry["final_attachments"]:
                headers = {"Authorization": f"Bearer {token}"}
                response = embedded.client.get(
                    f"/api/attachments/{ref['attachment_id']}", headers=headers
                )
                if response.status_code >= 400:
                    raise StorageError(f"attachment {ref['attachment_id']} unreadable")
                target = blob_dir / f"{ref['attachment_id'][:12]}-{ref['filename']}"
                target.write_bytes(response.content)
                copied += 1
        manifest = {"owner_id": user_id, "entries": entries}
        (out / "manifest.json").write_bytes(canonical_line(manifest))
        doc = {"owner_id": user_id, "entries": len(entries), "attachments": copied, "path": str(out)}
    except (KnetError, ScenarioError, OSError) as error:
        _fail(error)
        return
    _emit(doc, as_json,
          f"exported {doc['entries']} portfolio entries ({doc['attachments']} files) to {out}")


@export.command("journal")
@click.option("--out", type=click.Path(path_type=Path), required=True,
              help="Target directory for the segment copies.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.pass_context
def export_journal(ctx: click.Context, out: Path, as_json: bool) -> None:
    """Copy the journal segments, byte for byte."""
    try:
        journal = FileJournal(Path(ctx.obj["data_dir"]) / "journal")
        out.mkdir(parents=True, exist_ok=True)
        copied = []
        for path in journal.segment_paths():
            target = out / path.name
            shutil.copyfile(path, target)
            copied.append({"segment": path.name, "bytes": target.stat().st_size})
        journal.close()
        doc = {"segments": copied, "head_seq": journal.head_seq, "path": str(out)}
    except (KnetError, OSError) as error:
        _fail(error)
        return
    _emit(doc, as_json,
          f"copied {len(doc['segments'])} segments (head seq {doc['head_seq']}) to {out}")


@export.command("grades")
@click.argument("course_id")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Target file (defaults to stdout).")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable status output.")
@click.pass_context
def export_grades(ctx: click.Context, course_id: str, out: Path | None, as_json: bool) -> None:
    """Export a course's grade book as canonical JSON."""
    try:
        embedded = EmbeddedClient(ctx.obj["data_dir"])
        token = _admin_token(embedded.client, ctx.obj["admin_name"], ctx.obj["admin_password"])
        rows = _call(embedded.client, token, "get", f"/api/courses/{course_id}/grades")
        payload = canonical_line({"course_id": course_id, "rows": rows})
        if out is None:
            sys.stdout.buffer.write(payload)
            return
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(payload)
        doc = {"course_id": course_id, "rows": len(rows), "path": str(out)}
    except (KnetError, ScenarioError, OSError) as error:
        _fail(error)
        return
    _emit(doc, as_json, f"exported {doc['rows']} grade rows to {out}")


if __name__ == "__main__":
    main()
