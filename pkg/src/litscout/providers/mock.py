"""Deterministic fixture-replay providers.

Replay providers serve recorded responses keyed by content hashes, so the
whole pipeline runs offline and byte-identically. Strict mode treats a
missing fixture as an error; recording wrappers capture live responses
into the same layout so fixtures can be refreshed.

Layout:
    fixtures/transcripts/{request_hash}.txt      LLM completions
    fixtures/deep_research/{question_hash}.json  deep-research answers
    fixtures/metadata.json                       paper metadata table
"""

from __future__ import annotations

import hashlib
import re
from pathlib import Path

from litscout.errors import MissingFixtureError
from litscout.providers.base import DeepResearchProvider, LLMProvider, PaperMetadata
from litscout.providers.prompts import PromptRequest
from litscout.storage import atomic_write_json, atomic_write_text, read_json


def normalize_question_text(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().lower()


def question_hash(question_text: str) -> str:
    return hashlib.sha256(normalize_question_text(question_text).encode("utf-8")).hexdigest()


def transcript_fixture_path(fixtures_dir: Path, request_hash: str) -> Path:
    return Path(fixtures_dir) / "transcripts" / f"{request_hash}.txt"


def answer_fixture_path(fixtures_dir: Path, question_text: str) -> Path:
    return Path(fixtures_dir) / "deep_research" / f"{question_hash(question_text)}.json"


class ReplayLLM:
    def __init__(self, fixtures_dir: Path | str, strict: bool = True):
        self.fixtures_dir = Path(fixtures_dir)
        self.strict = strict

    def complete(self, request: PromptRequest) -> str:
        path = transcript_fixture_path(self.fixtures_dir, request.request_hash)
        if not path.exists():
            if self.strict:
                raise MissingFixtureError(
                    f"no transcript for {request.template_id.value} "
                    f"(hash {request.request_hash})"
                )
            return ""
        return path.read_text(encoding="utf-8")

    def record(self, request: PromptRequest, response: str) -> Path:
        path = transcript_fixture_path(self.fixtures_dir, request.request_hash)
        atomic_write_text(path, response)
        return path


class RecordingLLM:
    """Pass-through wrapper that captures live completions into fixtures."""

    def __init__(self, inner: LLMProvider, fixtures_dir: Path | str):
        self.inner = inner
        self.replay = ReplayLLM(fixtures_dir)

    def complete(self, request: PromptRequest) -> str:
        response = self.inner.complete(request)
        self.replay.record(request, response)
        return response


class ReplayDeepResearch:
    provider_id = "replay"

    def __init__(self, fixtures_dir: Path | str, strict: bool = True):
        self.fixtures_dir = Path(fixtures_dir)
        self.strict = strict

    def ask(self, question_text: str) -> dict:
        path = answer_fixture_path(self.fixtures_dir, question_text)
        data = read_json(path)
        if data is None:
            if self.strict:
                raise MissingFixtureError(f"no recorded answer for {question_text!r}")
            return {"answer_text": "", "citation_labels": {}}
        return data

    def record(self, question_text: str, answer: dict) -> Path:
        path = answer_fixture_path(self.fixtures_dir, question_text)
        atomic_write_json(path, answer)
        return path


class RecordingDeepResearch:
    def __init__(self, inner: DeepResearchProvider, fixtures_dir: Path | str):
        self.inner = inner
        self.provider_id = getattr(inner, "provider_id", "recorded")
        self.replay = ReplayDeepResearch(fixtures_dir)

    def ask(self, question_text: str) -> dict:
        answer = self.inner.ask(question_text)
        self.replay.record(question_text, answer)
        return answer


def normalize_title(title: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    cleaned = re.sub(r"[^\w\s]", " ", title.lower())
    return re.sub(r"\s+", " ", cleaned).strip()


class TableMetadata:
    """In-memory metadata provider backed by id and title tables."""

    def __init__(self, by_id: dict[str, dict] | None = None):
        self._by_id: dict[str, PaperMetadata] = {}
        self._by_title: dict[str, PaperMetadata] = {}
        for paper_id, record in (by_id or {}).items():
            self.add(
                PaperMetadata(
                    paper_id=paper_id,
                    title=record["title"],
                    url=record.get("url"),
                    abstract=record.get("abstract", ""),
                )
            )

    def add(self, metadata: PaperMetadata) -> None:
        self._by_id[metadata.paper_id] = metadata
        self._by_title[normalize_title(metadata.title)] = metadata

    def lookup_id(self, paper_id: str) -> PaperMetadata | None:
        return self._by_id.get(paper_id)

    def search_title(self, title: str) -> PaperMetadata | None:
        return self._by_title.get(normalize_title(title))


class ReplayMetadata(TableMetadata):
    """TableMetadata loaded from fixtures/metadata.json ({paper_id: {...}})."""

    def __init__(self, fixtures_dir: Path | str):
        table = read_json(Path(fixtures_dir) / "metadata.json", default={})
        super().__init__(by_id=table)
