"""Command-line entry points: serve, run, inspect, demo."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from litscout.config import load_config
from litscout.service import build_services
from litscout.storage import read_json, read_jsonl
from litscout.updates.runs import RunTrigger


def _services(config_path: str | None):
    return build_services(load_config(config_path))


@click.group()
@click.option("--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--static-dir", type=click.Path(), default=None, help="Frontend assets to serve at /.")
def serve(config_path: str | None, static_dir: str | None):
    """Start the HTTP API plus the heartbeat scheduler."""
    import uvicorn

    from litscout.api import create_app

    services = _services(config_path)
    static = Path(static_dir) if static_dir else Path("frontend/dist")
    app = create_app(services, static_dir=static if static.exists() else None)
    app.state.background_refresh = True
    loop = services.scheduler_loop()
    loop.start()
    try:
        uvicorn.run(app, host=services.config.host, port=services.config.port)
    finally:
        loop.stop()


@main.command()
@click.option("--project", "project_id", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def run(project_id: str, config_path: str | None):
    """Execute one update run for a project (bypasses the change gate)."""
    services = _services(config_path)
    result = services.runner.run_update(project_id, trigger=RunTrigger.MANUAL)
    click.echo(
        json.dumps(
            {
                "run_id": result.run_id,
                "status": result.status.value,
                "questions_issued": len(result.questions_issued),
                "suggestions_delivered": len(result.suggestions_delivered),
                "notification_sent": result.notification_sent,
            },
            indent=2,
        )
    )
    if result.status.value == "failed":
        sys.exit(1)


@main.command()
@click.option("--project", "project_id", required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def inspect(project_id: str, config_path: str | None):
    """Dump a project's persisted state as JSON."""
    services = _services(config_path)
    project = services.projects.get_project(project_id)
    assessment = services.analysis.load_assessment(project_id)
    payload = {
        "project": project.to_record(),
        "state": assessment.to_record() if assessment else None,
        "questions": [q.to_record() for q in services.analysis.load_questions(project_id)],
        "papers": [p.to_record() for p in services.catalog.load(project_id)],
        "suggestions": read_jsonl(services.projects.suggestions_path(project_id)),
        "runs": [
            read_json(services.projects.runs_dir(project_id) / f"{run_id}.json")
            for run_id in services.projects.list_run_ids(project_id)
        ],
        "latest_revision_id": services.documents.latest_revision_id(project_id),
    }
    click.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))


@main.command()
@click.option("--dir", "workspace", type=click.Path(), default="demo-workspace")
def demo(workspace: str):
    """Seed a self-contained demo workspace with replay fixtures."""
    from litscout.demo import build_demo_workspace

    root = build_demo_workspace(Path(workspace))
    click.echo(f"demo workspace ready at {root}")
    click.echo(f"try: litscout run --project fixture --config {root / 'config.yaml'}")


if __name__ == "__main__":
    main()
