"""HTTP API for the dashboard UI and automation.

All payloads are JSON; errors carry a stable ``machine_code`` plus a
human message. Mutations go through the same stores and locks as the
update pipeline, so the API can never race a run into corrupt state.
"""

from __future__ import annotations

import logging
import threading
from pathlib import Path

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from litscout.clock import isoformat_utc
from litscout.documents.sources import SourceKind, SourceLocator
from litscout.errors import (
    AmbiguousPaperError,
    DuplicateQuestionError,
    DuplicateSourceError,
    LitscoutError,
    MalformedAddressError,
    NoBaselineAnswerError,
    RunInFlightError,
    UnknownPaperError,
    UnknownProjectError,
    UnknownQuestionError,
    ValidationFailure,
)
from litscout.projects import ProjectRecord, UpdateFrequency
from litscout.service import Services
from litscout.storage import read_jsonl
from litscout.suggestions.models import Suggestion
from litscout.updates.runs import RunTrigger

logger = logging.getLogger(__name__)

_STATUS_BY_ERROR: list[tuple[type, int]] = [
    (UnknownProjectError, 404),
    (UnknownQuestionError, 404),
    (UnknownPaperError, 404),
    (RunInFlightError, 409),
    (AmbiguousPaperError, 409),
    (DuplicateQuestionError, 409),
    (DuplicateSourceError, 409),
    (NoBaselineAnswerError, 409),
    (MalformedAddressError, 422),
    (ValidationFailure, 422),
    (LitscoutError, 500),
]


def _status_for(exc: LitscoutError) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


class SourceBody(BaseModel):
    kind: SourceKind
    address: str
    display_name: str = ""


class CreateProjectBody(BaseModel):
    name: str
    source: SourceBody
    frequency: UpdateFrequency | None = None


class StateBody(BaseModel):
    label: str | None = None
    clear_override: bool = False


class QuestionBody(BaseModel):
    text: str


class TrackBody(BaseModel):
    tracked: bool


class RelationBody(BaseModel):
    relation: str


class SettingsBody(BaseModel):
    frequency: UpdateFrequency


def _project_payload(services: Services, project: ProjectRecord) -> dict:
    assessment = services.analysis.load_assessment(project.project_id)
    questions = services.analysis.load_questions(project.project_id)
    papers = services.catalog.load(project.project_id)
    run_ids = services.projects.list_run_ids(project.project_id)
    return {
        "project_id": project.project_id,
        "name": project.name,
        "frequency": project.frequency.value,
        "created_at": project.created_at,
        "sources": [s.to_record() for s in project.sources],
        "state": (
            {
                "label": assessment.state_label,
                "rationale": assessment.rationale,
                "assessed_at": assessment.assessed_at,
                "user_overridden": assessment.user_overridden,
            }
            if assessment
            else None
        ),
        "question_count": len(questions),
        "paper_count": len([p for p in papers if not p.removed_by_user]),
        "latest_run_id": run_ids[-1] if run_ids else None,
        "latest_revision_id": services.documents.latest_revision_id(project.project_id),
        "run_in_flight": services.runner.lock.is_held(project.project_id),
    }


def _delivered_suggestions(services: Services, project_id: str) -> list[Suggestion]:
    records = read_jsonl(services.projects.suggestions_path(project_id))
    return [Suggestion.from_record(r) for r in records]


def _suggestion_card(services: Services, project_id: str, suggestion: Suggestion) -> dict:
    record = suggestion.to_record()
    try:
        question = services.analysis.get_question(project_id, suggestion.question_id)
        record["question_text"] = question.text
    except UnknownQuestionError:
        record["question_text"] = None
    return record


def create_app(services: Services, static_dir: Path | str | None = None) -> FastAPI:
    app = FastAPI(title="litscout", version="0.1.0")
    app.state.services = services

    @app.exception_handler(LitscoutError)
    async def litscout_error_handler(_request: Request, exc: LitscoutError):
        return JSONResponse(
            status_code=_status_for(exc),
            content={"machine_code": exc.machine_code, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"machine_code": "validation_error", "message": str(exc.errors())},
        )

    class _Unauthorized(Exception):
        pass

    async def auth(authorization: str | None = Header(default=None)):
        token = services.config.api_token
        if token and authorization != f"Bearer {token}":
            raise _Unauthorized()

    @app.exception_handler(_Unauthorized)
    async def unauthorized_handler(_request: Request, _exc: _Unauthorized):
        return JSONResponse(
            status_code=401,
            content={"machine_code": "unauthorized", "message": "bad or missing token"},
        )

    api = "/api/v1"

    # -- projects -----------------------------------------------------------

    @app.post(f"{api}/projects", status_code=201, dependencies=[Depends(auth)])
    def create_project(body: CreateProjectBody):
        if not body.name.strip():
            raise ValidationFailure("project name must be non-empty")
        frequency = body.frequency or UpdateFrequency(services.config.default_frequency)
        project_id = services.projects.new_project_id(body.name)
        project = ProjectRecord(
            project_id=project_id,
            name=body.name.strip(),
            frequency=frequency,
            created_at=isoformat_utc(services.clock.now()),
        )
        services.projects.create_project(project)
        services.documents.register_source(
            project_id,
            SourceLocator(
                source_id="",
                kind=body.source.kind,
                address=body.source.address,
                display_name=body.source.display_name,
            ),
        )
        return _project_payload(services, services.projects.get_project(project_id))

    @app.get(f"{api}/projects", dependencies=[Depends(auth)])
    def list_projects():
        return [
            _project_payload(services, project)
            for project in services.projects.list_projects()
        ]

    @app.get(f"{api}/projects/{{project_id}}", dependencies=[Depends(auth)])
    def get_project(project_id: str):
        return _project_payload(services, services.projects.get_project(project_id))

    @app.patch(f"{api}/projects/{{project_id}}/state", dependencies=[Depends(auth)])
    def patch_state(project_id: str, body: StateBody):
        if body.clear_override:
            assessment = services.analysis.clear_state_override(project_id)
        else:
            if body.label is None:
                raise ValidationFailure("provide a label or clear_override")
            assessment = services.analysis.apply_state_override(project_id, body.label)
        return assessment.to_record() if assessment else None

    @app.get(f"{api}/projects/{{project_id}}/suggestions", dependencies=[Depends(auth)])
    def get_suggestions(project_id: str, since_run: str | None = None):
        services.projects.get_project(project_id)
        suggestions = _delivered_suggestions(services, project_id)
        if since_run:
            suggestions = [
                s for s in suggestions if s.run_id is not None and s.run_id > since_run
            ]
        return [_suggestion_card(services, project_id, s) for s in suggestions]

    @app.get(f"{api}/projects/{{project_id}}/document", dependencies=[Depends(auth)])
    def get_document(project_id: str, revision: int | None = None):
        services.projects.get_project(project_id)
        revision_id = revision or services.documents.latest_revision_id(project_id)
        if revision_id is None:
            raise ValidationFailure(f"project {project_id!r} has no snapshots yet")
        snapshot = services.documents.get_snapshot(project_id, revision_id)
        if snapshot is None:
            raise ValidationFailure(f"no revision {revision_id} for {project_id!r}")
        # Only anchors minted against the displayed revision are rendered.
        anchors = [
            s.anchor.to_record() | {"suggestion_id": s.suggestion_id}
            for s in _delivered_suggestions(services, project_id)
            if s.anchor is not None and s.anchor.revision_id == revision_id
        ]
        return {
            "project_id": project_id,
            "revision_id": revision_id,
            "fetched_at": isoformat_utc(snapshot.fetched_at),
            "text": snapshot.text,
            "sentences": [s.to_record() for s in snapshot.sentences],
            "anchors": anchors,
        }

    # -- questions ------------------------------------------------------------

    @app.get(f"{api}/projects/{{project_id}}/questions", dependencies=[Depends(auth)])
    def list_questions(project_id: str):
        services.projects.get_project(project_id)
        return [q.to_record() for q in services.analysis.load_questions(project_id)]

    @app.post(
        f"{api}/projects/{{project_id}}/questions",
        status_code=201,
        dependencies=[Depends(auth)],
    )
    def add_question(project_id: str, body: QuestionBody):
        return services.analysis.add_user_question(project_id, body.text).to_record()

    @app.get(f"{api}/questions/{{question_id}}", dependencies=[Depends(auth)])
    def get_question(question_id: str):
        project_id, question = services.runner.get_question_anywhere(question_id)
        answers = services.gateway.stored_answers(project_id, question_id)
        summary = services.runner.load_summary(project_id, question_id)
        linked = [
            _suggestion_card(services, project_id, s)
            for s in _delivered_suggestions(services, project_id)
            if s.question_id == question_id
        ]
        return {
            "project_id": project_id,
            "question": question.to_record(),
            "summary": summary["summary"] if summary else None,
            "answers": [a.to_record() for a in answers],
            "suggestions": linked,
        }

    @app.post(f"{api}/questions/{{question_id}}/track", dependencies=[Depends(auth)])
    def track_question(question_id: str, body: TrackBody):
        project_id, _question = services.runner.get_question_anywhere(question_id)
        return services.runner.set_tracked(project_id, question_id, body.tracked).to_record()

    # -- papers ----------------------------------------------------------------

    @app.get(f"{api}/projects/{{project_id}}/papers", dependencies=[Depends(auth)])
    def list_papers(project_id: str):
        services.projects.get_project(project_id)
        return [p.to_record() for p in services.catalog.load(project_id)]

    def _project_for_paper(paper_id: str) -> str:
        holders = [
            project.project_id
            for project in services.projects.list_projects()
            if any(p.paper_id == paper_id for p in services.catalog.load(project.project_id))
        ]
        if not holders:
            raise UnknownPaperError(f"no paper {paper_id!r}")
        if len(holders) > 1:
            raise AmbiguousPaperError(
                f"paper {paper_id!r} exists in multiple projects: {holders}"
            )
        return holders[0]

    @app.patch(f"{api}/papers/{{paper_id:path}}", dependencies=[Depends(auth)])
    def edit_paper(paper_id: str, body: RelationBody):
        project_id = _project_for_paper(paper_id)
        return services.catalog.edit_relation(project_id, paper_id, body.relation).to_record()

    @app.delete(f"{api}/papers/{{paper_id:path}}", dependencies=[Depends(auth)])
    def remove_paper(paper_id: str):
        project_id = _project_for_paper(paper_id)
        return services.catalog.remove_paper(project_id, paper_id).to_record()

    # -- settings / refresh -------------------------------------------------------

    @app.patch(f"{api}/projects/{{project_id}}/settings", dependencies=[Depends(auth)])
    def patch_settings(project_id: str, body: SettingsBody):
        services.heartbeat.set_update_frequency(project_id, body.frequency)
        return _project_payload(services, services.projects.get_project(project_id))

    @app.post(
        f"{api}/projects/{{project_id}}/refresh",
        status_code=202,
        dependencies=[Depends(auth)],
    )
    def refresh(project_id: str):
        services.projects.get_project(project_id)
        if services.runner.lock.is_held(project_id):
            raise RunInFlightError(f"run already in flight for {project_id}")
        if getattr(app.state, "background_refresh", False):
            expected_run_id = services.runner.next_run_id(project_id)

            def execute():
                try:
                    services.runner.run_update(project_id, trigger=RunTrigger.MANUAL)
                except LitscoutError as exc:
                    logger.error("manual run failed for %s: %s", project_id, exc)

            threading.Thread(target=execute, daemon=True).start()
            return {"run_id": expected_run_id, "status": "accepted"}
        run = services.runner.run_update(project_id, trigger=RunTrigger.MANUAL)
        return {"run_id": run.run_id, "status": run.status.value}

    # -- questions listing helpers for the UI -----------------------------------

    @app.get(f"{api}/projects/{{project_id}}/runs", dependencies=[Depends(auth)])
    def list_runs(project_id: str):
        services.projects.get_project(project_id)
        from litscout.storage import read_json

        return [
            read_json(services.projects.runs_dir(project_id) / f"{run_id}.json")
            for run_id in services.projects.list_run_ids(project_id)
        ]

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
