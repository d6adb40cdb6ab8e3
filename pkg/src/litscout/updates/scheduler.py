"""Heartbeat scheduling: frequency-gated change checks per project.

The tick runs cheaply and often (default hourly); each project's
frequency decides when it is due for a change check, and only a detected
change enqueues an update run. Fetch problems and per-project errors are
logged and retried next tick — the heartbeat itself never dies.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime

from litscout.clock import Clock, isoformat_utc, parse_utc
from litscout.documents.store import ChangeReport, DocumentStore
from litscout.errors import RunInFlightError, UnknownProjectError, ValidationFailure
from litscout.projects import ProjectStore, UpdateFrequency
from litscout.storage import atomic_write_json, read_json
from litscout.updates.runs import RunTrigger, UpdateRunner

logger = logging.getLogger(__name__)


class SchedulerState:
    """Per-project last-checked / next-due bookkeeping (scheduler.json)."""

    def __init__(self, projects: ProjectStore):
        self.projects = projects

    def load(self) -> dict[str, dict]:
        data = read_json(self.projects.scheduler_path, default={"projects": {}})
        return data.get("projects", {})

    def save(self, state: dict[str, dict]) -> None:
        atomic_write_json(self.projects.scheduler_path, {"projects": state})

    def entry(self, project_id: str) -> dict:
        return self.load().get(project_id, {})

    def set_next_due(self, project_id: str, next_due: datetime | None) -> None:
        state = self.load()
        entry = state.setdefault(project_id, {})
        entry["next_due"] = isoformat_utc(next_due) if next_due else None
        self.save(state)

    def recompute_next_due(self, project_id: str, frequency: UpdateFrequency, clock: Clock) -> None:
        """After a frequency change: re-derive next_due from last_checked."""
        delta = frequency.delta
        if delta is None:
            self.set_next_due(project_id, None)
            return
        entry = self.entry(project_id)
        base = parse_utc(entry["last_checked"]) if entry.get("last_checked") else clock.now()
        self.set_next_due(project_id, base + delta)


class Heartbeat:
    def __init__(
        self,
        projects: ProjectStore,
        documents: DocumentStore,
        runner: UpdateRunner,
        clock: Clock,
        max_concurrent_runs: int = 2,
    ):
        self.projects = projects
        self.documents = documents
        self.runner = runner
        self.clock = clock
        self.state = SchedulerState(projects)
        self.max_concurrent_runs = max_concurrent_runs

    def due_projects(self, now: datetime) -> list[str]:
        due = []
        projects_dir = self.projects.projects_dir
        if not projects_dir.exists():
            return []
        for path in sorted(projects_dir.iterdir()):
            try:
                project = self.projects.get_project(path.name)
            except Exception as exc:  # noqa: BLE001 - one bad registry entry
                logger.error("unreadable project %s skipped: %s", path.name, exc)
                continue
            if project.frequency == UpdateFrequency.NEVER:
                continue
            entry = self.state.entry(project.project_id)
            next_due = entry.get("next_due")
            if next_due is None or now >= parse_utc(next_due):
                due.append(project.project_id)
        return due

    def _evaluate(self, now: datetime) -> list[ChangeReport]:
        """Run change checks for due projects; return the changed ones.

        Each due project gets its last-checked advanced and its next due
        date pushed one frequency interval out, changed or not. Errors
        are contained per project.
        """
        changed: list[ChangeReport] = []
        state = self.state.load()
        for project_id in self.due_projects(now):
            try:
                project = self.projects.get_project(project_id)
                report: ChangeReport = self.documents.detect_change(project_id)
            except Exception as exc:  # noqa: BLE001 - tick never aborts
                logger.error("change check failed for %s: %s", project_id, exc)
                continue
            entry = state.setdefault(project_id, {})
            entry["last_checked"] = isoformat_utc(now)
            delta = project.frequency.delta
            entry["next_due"] = isoformat_utc(now + delta) if delta else None
            if report.changed:
                changed.append(report)
        self.state.save(state)
        return changed

    def heartbeat_tick(self, now: datetime | None = None) -> list[str]:
        """Project ids whose change check fired and deserve an update run."""
        return [r.project_id for r in self._evaluate(now or self.clock.now())]

    def run_tick(self, now: datetime | None = None) -> list[str]:
        """heartbeat_tick plus execution of the triggered runs."""
        reports = self._evaluate(now or self.clock.now())
        if not reports:
            return []

        def run_one(report: ChangeReport) -> None:
            try:
                self.runner.run_update(
                    report.project_id,
                    trigger=RunTrigger.SCHEDULED,
                    change_reason=report.reason.value,
                )
            except RunInFlightError:
                logger.info(
                    "skipping scheduled run for %s: already running", report.project_id
                )
            except Exception as exc:  # noqa: BLE001 - isolation contract
                logger.error("scheduled run failed for %s: %s", report.project_id, exc)

        if len(reports) == 1:
            run_one(reports[0])
        else:
            with ThreadPoolExecutor(max_workers=self.max_concurrent_runs) as pool:
                list(pool.map(run_one, reports))
        return [r.project_id for r in reports]

    # -- user controls ------------------------------------------------------

    def set_update_frequency(self, project_id: str, frequency: UpdateFrequency) -> None:
        project = self.projects.get_project(project_id)
        project.frequency = frequency
        self.projects.save_project(project)
        self.state.recompute_next_due(project_id, frequency, self.clock)

    def request_manual_update(self, project_id: str):
        """Manual refresh: bypasses the change gate, not dedup."""
        if not self.projects.exists(project_id):
            raise UnknownProjectError(f"no project {project_id!r}")
        return self.runner.run_update(project_id, trigger=RunTrigger.MANUAL)


class SchedulerLoop:
    """Background thread calling run_tick at a fixed interval."""

    def __init__(self, heartbeat: Heartbeat, tick_interval_seconds: float = 3600.0):
        if tick_interval_seconds <= 0:
            raise ValidationFailure("tick interval must be positive")
        self.heartbeat = heartbeat
        self.tick_interval_seconds = tick_interval_seconds
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        if self._thread is not None:
            return
        self._thread = threading.Thread(target=self._loop, name="heartbeat", daemon=True)
        self._thread.start()

    def _loop(self) -> None:
        while not self._stop.wait(self.tick_interval_seconds):
            try:
                self.heartbeat.run_tick()
            except Exception as exc:  # noqa: BLE001 - loop must survive
                logger.error("heartbeat tick crashed: %s", exc)

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=5)
            self._thread = None
