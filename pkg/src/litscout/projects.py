"""Project registry and the on-disk layout of all per-project state.

Tree rooted at ``data_dir``:

    data/
      scheduler.json
      notifications.log
      projects/{project_id}/
        project.json
        snapshots/{revision_id}.md
        snapshots/{revision_id}.index.json
        papers.json
        questions.json
        state.json
        suggestions.jsonl
        seen_hashes.txt
        answers/{question_id}/{seq}.json
        runs/{run_id}.json
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import timedelta
from enum import Enum
from pathlib import Path

from litscout.documents.sources import SourceLocator
from litscout.errors import UnknownProjectError, ValidationFailure
from litscout.storage import atomic_write_json, read_json


class UpdateFrequency(str, Enum):
    DAILY = "daily"
    EVERY_2_DAYS = "every_2_days"
    WEEKLY = "weekly"
    BIWEEKLY = "biweekly"
    NEVER = "never"

    @property
    def delta(self) -> timedelta | None:
        """Scheduling interval; None means no scheduled checks."""
        return _FREQUENCY_DELTAS[self]


_FREQUENCY_DELTAS = {
    UpdateFrequency.DAILY: timedelta(days=1),
    UpdateFrequency.EVERY_2_DAYS: timedelta(days=2),
    UpdateFrequency.WEEKLY: timedelta(days=7),
    UpdateFrequency.BIWEEKLY: timedelta(days=14),
    UpdateFrequency.NEVER: None,
}


@dataclass
class ProjectRecord:
    project_id: str
    name: str
    frequency: UpdateFrequency
    created_at: str
    sources: list[SourceLocator] = field(default_factory=list)
    question_count: int | None = None  # per-project override of the config default

    def to_record(self) -> dict:
        return {
            "project_id": self.project_id,
            "name": self.name,
            "frequency": self.frequency.value,
            "created_at": self.created_at,
            "sources": [s.to_record() for s in self.sources],
            "question_count": self.question_count,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ProjectRecord":
        return cls(
            project_id=record["project_id"],
            name=record["name"],
            frequency=UpdateFrequency(record["frequency"]),
            created_at=record["created_at"],
            sources=[SourceLocator.from_record(s) for s in record.get("sources", [])],
            question_count=record.get("question_count"),
        )


def slugify(name: str) -> str:
    slug = re.sub(r"[^a-z0-9]+", "-", name.lower()).strip("-")
    return slug or "project"


class ProjectStore:
    """Owns the data tree and the project registry."""

    def __init__(self, data_dir: Path | str):
        self.data_dir = Path(data_dir)

    # -- paths ------------------------------------------------------------

    @property
    def projects_dir(self) -> Path:
        return self.data_dir / "projects"

    @property
    def scheduler_path(self) -> Path:
        return self.data_dir / "scheduler.json"

    @property
    def notifications_path(self) -> Path:
        return self.data_dir / "notifications.log"

    def project_dir(self, project_id: str) -> Path:
        return self.projects_dir / project_id

    def project_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "project.json"

    def snapshots_dir(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "snapshots"

    def papers_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "papers.json"

    def questions_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "questions.json"

    def state_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "state.json"

    def suggestions_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "suggestions.jsonl"

    def seen_hashes_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "seen_hashes.txt"

    def answers_dir(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "answers"

    def runs_dir(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "runs"

    def lock_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "run.lock"

    # -- registry ---------------------------------------------------------

    def exists(self, project_id: str) -> bool:
        return self.project_path(project_id).exists()

    def create_project(self, record: ProjectRecord) -> ProjectRecord:
        if not record.project_id:
            raise ValidationFailure("project_id must be non-empty")
        if self.exists(record.project_id):
            raise ValidationFailure(f"project {record.project_id!r} already exists")
        atomic_write_json(self.project_path(record.project_id), record.to_record())
        return record

    def new_project_id(self, name: str) -> str:
        base = slugify(name)
        candidate = base
        n = 1
        while self.exists(candidate):
            n += 1
            candidate = f"{base}-{n}"
        return candidate

    def get_project(self, project_id: str) -> ProjectRecord:
        data = read_json(self.project_path(project_id))
        if data is None:
            raise UnknownProjectError(f"no project {project_id!r}")
        return ProjectRecord.from_record(data)

    def save_project(self, record: ProjectRecord) -> None:
        if not self.exists(record.project_id):
            raise UnknownProjectError(f"no project {record.project_id!r}")
        atomic_write_json(self.project_path(record.project_id), record.to_record())

    def list_projects(self) -> list[ProjectRecord]:
        if not self.projects_dir.exists():
            return []
        out = []
        for path in sorted(self.projects_dir.iterdir()):
            if (path / "project.json").exists():
                out.append(self.get_project(path.name))
        return out

    def list_run_ids(self, project_id: str) -> list[str]:
        runs = self.runs_dir(project_id)
        if not runs.exists():
            return []
        return sorted(p.stem for p in runs.glob("*.json"))

    def latest_run_record(self, project_id: str) -> dict | None:
        run_ids = self.list_run_ids(project_id)
        if not run_ids:
            return None
        return read_json(self.runs_dir(project_id) / f"{run_ids[-1]}.json")
