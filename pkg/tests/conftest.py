"""Shared test harness: tmp-rooted stores, frozen clock, replay providers."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import pytest

from litscout.analysis import AnalysisStore
from litscout.clock import FixedClock, isoformat_utc
from litscout.documents.sources import SourceKind, SourceLocator
from litscout.documents.store import DocumentStore
from litscout.papers import PaperCatalog
from litscout.projects import ProjectRecord, ProjectStore, UpdateFrequency
from litscout.providers.base import PaperMetadata
from litscout.providers.gateway import ResearchGateway
from litscout.providers.mock import ReplayDeepResearch, ReplayLLM, TableMetadata
from litscout.providers.prompts import TemplateId, build_request
from litscout.updates.runs import UpdateRunner
from litscout.updates.scheduler import Heartbeat

FROZEN = datetime(2026, 8, 10, 12, 0, 0, tzinfo=timezone.utc)


@dataclass
class Harness:
    tmp: Path
    clock: FixedClock
    projects: ProjectStore
    documents: DocumentStore
    llm: ReplayLLM
    deep: ReplayDeepResearch
    metadata: TableMetadata
    gateway: ResearchGateway
    catalog: PaperCatalog
    analysis: AnalysisStore
    runner: UpdateRunner
    heartbeat: Heartbeat
    notifications: list

    def record(self, template_id: TemplateId, variables: dict, response: str) -> None:
        self.llm.record(build_request(template_id, variables), response)

    def record_answer(self, question_text: str, record: dict) -> None:
        self.deep.record(question_text, record)

    def add_paper(self, paper_id: str, title: str, abstract: str = "", url: str | None = None):
        self.metadata.add(
            PaperMetadata(paper_id=paper_id, title=title, url=url, abstract=abstract)
        )

    def make_project(
        self,
        project_id: str = "proj1",
        doc_text: str = "# Doc\n\nOne sentence here.\n",
        frequency: UpdateFrequency = UpdateFrequency.WEEKLY,
        name: str = "Test project",
    ) -> Path:
        doc_path = self.tmp / f"{project_id}.md"
        doc_path.write_text(doc_text, encoding="utf-8")
        self.projects.create_project(
            ProjectRecord(
                project_id=project_id,
                name=name,
                frequency=frequency,
                created_at=isoformat_utc(self.clock.now()),
            )
        )
        self.documents.register_source(
            project_id,
            SourceLocator(
                source_id="",
                kind=SourceKind.LOCAL_FILE,
                address=str(doc_path),
                display_name="doc",
            ),
        )
        return doc_path


@pytest.fixture
def demo_root(tmp_path: Path) -> Path:
    """Fresh demo workspace: fixture corpus + frozen-clock config."""
    from litscout.demo import build_demo_workspace

    return build_demo_workspace(tmp_path / "ws")


@pytest.fixture
def harness(tmp_path: Path) -> Harness:
    clock = FixedClock(FROZEN)
    projects = ProjectStore(tmp_path / "data")
    documents = DocumentStore(projects, clock)
    llm = ReplayLLM(tmp_path / "fixtures")
    deep = ReplayDeepResearch(tmp_path / "fixtures")
    metadata = TableMetadata()
    gateway = ResearchGateway(
        llm=llm,
        deep_research=deep,
        metadata=metadata,
        projects=projects,
        clock=clock,
        sleeper=lambda _s: None,
    )
    catalog = PaperCatalog(projects, gateway)
    analysis = AnalysisStore(projects, clock)
    notifications: list = []

    def notify(project_id, run, delivered):
        notifications.append((project_id, run.run_id, len(delivered)))
        return True

    runner = UpdateRunner(
        projects=projects,
        documents=documents,
        catalog=catalog,
        analysis=analysis,
        gateway=gateway,
        clock=clock,
        notify=notify,
    )
    heartbeat = Heartbeat(projects, documents, runner, clock)
    return Harness(
        tmp=tmp_path,
        clock=clock,
        projects=projects,
        documents=documents,
        llm=llm,
        deep=deep,
        metadata=metadata,
        gateway=gateway,
        catalog=catalog,
        analysis=analysis,
        runner=runner,
        heartbeat=heartbeat,
        notifications=notifications,
    )
