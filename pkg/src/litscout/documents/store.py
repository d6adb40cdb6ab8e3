"""Snapshot persistence and change detection for project documents."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

from litscout.clock import Clock, isoformat_utc, parse_utc
from litscout.documents.normalize import normalize
from litscout.documents.sentences import SentenceEntry, segment_sentences
from litscout.documents.sources import FetchResult, SourceLocator, fetch_document, validate_address
from litscout.errors import DuplicateSourceError, LitscoutError, ValidationFailure
from litscout.projects import ProjectStore
from litscout.storage import atomic_write_json, atomic_write_text, read_json

logger = logging.getLogger(__name__)


def content_hash_of(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class ChangeReason(str, Enum):
    LAST_MODIFIED_ADVANCED = "last_modified_advanced"
    CONTENT_HASH_DIFFERS = "content_hash_differs"
    STATE_SHIFTED = "state_shifted"
    NONE = "none"


@dataclass
class ChangeReport:
    project_id: str
    changed: bool
    reason: ChangeReason
    old_revision_id: int | None = None
    new_last_modified: datetime | None = None


@dataclass
class DocumentSnapshot:
    project_id: str
    source_id: str
    revision_id: int
    fetched_at: datetime
    last_modified: datetime | None
    text: str
    sentences: list[SentenceEntry]
    content_hash: str


class DocumentStore:
    """Fetch, normalize, segment, and version project documents."""

    def __init__(self, projects: ProjectStore, clock: Clock | None = None):
        self.projects = projects
        self.clock = clock or Clock()

    # -- sources ----------------------------------------------------------

    def register_source(self, project_id: str, locator: SourceLocator) -> str:
        """Persist a source on the project; no fetch happens here."""
        project = self.projects.get_project(project_id)
        validate_address(locator.kind, locator.address)
        source_id = locator.source_id or f"src-{len(project.sources) + 1}"
        if any(s.source_id == source_id for s in project.sources):
            raise DuplicateSourceError(f"source {source_id!r} already registered")
        locator = SourceLocator(
            source_id=source_id,
            kind=locator.kind,
            address=locator.address,
            display_name=locator.display_name,
        )
        project.sources.append(locator)
        self.projects.save_project(project)
        return source_id

    def get_source(self, project_id: str, source_id: str) -> SourceLocator:
        project = self.projects.get_project(project_id)
        for source in project.sources:
            if source.source_id == source_id:
                return source
        raise ValidationFailure(f"no source {source_id!r} on project {project_id!r}")

    def primary_source(self, project_id: str) -> SourceLocator:
        project = self.projects.get_project(project_id)
        if not project.sources:
            raise ValidationFailure(f"project {project_id!r} has no sources")
        return project.sources[0]

    # -- snapshots ----------------------------------------------------------

    def _next_revision_id(self, project_id: str) -> int:
        snaps = self.projects.snapshots_dir(project_id)
        if not snaps.exists():
            return 1
        ids = [int(p.stem) for p in snaps.glob("*.md") if p.stem.isdigit()]
        return max(ids, default=0) + 1

    def snapshot(self, project_id: str, source_id: str | None = None) -> DocumentSnapshot:
        """Fetch the source and persist a new immutable revision."""
        locator = (
            self.get_source(project_id, source_id)
            if source_id
            else self.primary_source(project_id)
        )
        fetched: FetchResult = fetch_document(locator)
        text = normalize(fetched.raw, fetched.content_kind)
        sentences = segment_sentences(text)
        revision_id = self._next_revision_id(project_id)
        snap = DocumentSnapshot(
            project_id=project_id,
            source_id=locator.source_id,
            revision_id=revision_id,
            fetched_at=self.clock.now(),
            last_modified=fetched.last_modified,
            text=text,
            sentences=sentences,
            content_hash=content_hash_of(text),
        )
        snaps = self.projects.snapshots_dir(project_id)
        atomic_write_text(snaps / f"{revision_id}.md", text)
        atomic_write_json(
            snaps / f"{revision_id}.index.json",
            {
                "source_id": snap.source_id,
                "revision_id": revision_id,
                "fetched_at": isoformat_utc(snap.fetched_at),
                "last_modified": (
                    isoformat_utc(snap.last_modified) if snap.last_modified else None
                ),
                "content_hash": snap.content_hash,
                "sentences": [s.to_record() for s in sentences],
            },
        )
        return snap

    def get_snapshot(self, project_id: str, revision_id: int) -> DocumentSnapshot | None:
        snaps = self.projects.snapshots_dir(project_id)
        text_path = snaps / f"{revision_id}.md"
        index = read_json(snaps / f"{revision_id}.index.json")
        if index is None or not text_path.exists():
            return None
        return DocumentSnapshot(
            project_id=project_id,
            source_id=index["source_id"],
            revision_id=revision_id,
            fetched_at=parse_utc(index["fetched_at"]),
            last_modified=(
                parse_utc(index["last_modified"]) if index.get("last_modified") else None
            ),
            text=text_path.read_text(encoding="utf-8"),
            sentences=[SentenceEntry.from_record(r) for r in index["sentences"]],
            content_hash=index["content_hash"],
        )

    def latest_revision_id(self, project_id: str) -> int | None:
        snaps = self.projects.snapshots_dir(project_id)
        if not snaps.exists():
            return None
        ids = [int(p.stem) for p in snaps.glob("*.md") if p.stem.isdigit()]
        return max(ids, default=None)

    # -- change detection ---------------------------------------------------

    def detect_change(self, project_id: str) -> ChangeReport:
        """Compare the live document and persisted state against the last run.

        A project with no recorded run counts as changed so onboarding
        triggers the first pipeline run. Fetch failures never propagate:
        the report says unchanged and the scheduler retries next tick.
        """
        self.projects.get_project(project_id)
        last_run = self.projects.latest_run_record(project_id)
        try:
            locator = self.primary_source(project_id)
            fetched = fetch_document(locator)
            text = normalize(fetched.raw, fetched.content_kind)
        except LitscoutError as exc:
            logger.warning("change check fetch failed for %s: %s", project_id, exc)
            return ChangeReport(
                project_id=project_id, changed=False, reason=ChangeReason.NONE
            )

        if last_run is None:
            return ChangeReport(
                project_id=project_id,
                changed=True,
                reason=ChangeReason.LAST_MODIFIED_ADVANCED,
                old_revision_id=None,
                new_last_modified=fetched.last_modified,
            )

        old_revision = last_run.get("input_revision_id")
        recorded_lm = last_run.get("recorded_last_modified")
        if fetched.last_modified is not None and recorded_lm is not None:
            if fetched.last_modified > parse_utc(recorded_lm):
                return ChangeReport(
                    project_id=project_id,
                    changed=True,
                    reason=ChangeReason.LAST_MODIFIED_ADVANCED,
                    old_revision_id=old_revision,
                    new_last_modified=fetched.last_modified,
                )

        if content_hash_of(text) != last_run.get("recorded_content_hash"):
            return ChangeReport(
                project_id=project_id,
                changed=True,
                reason=ChangeReason.CONTENT_HASH_DIFFERS,
                old_revision_id=old_revision,
                new_last_modified=fetched.last_modified,
            )

        state = read_json(self.projects.state_path(project_id))
        current_label = state.get("state_label") if state else None
        if current_label != last_run.get("recorded_state_label"):
            return ChangeReport(
                project_id=project_id,
                changed=True,
                reason=ChangeReason.STATE_SHIFTED,
                old_revision_id=old_revision,
                new_last_modified=fetched.last_modified,
            )

        return ChangeReport(
            project_id=project_id,
            changed=False,
            reason=ChangeReason.NONE,
            old_revision_id=old_revision,
            new_last_modified=fetched.last_modified,
        )
