"""Gateway in front of all external providers.

Adds retry with backoff, a per-provider concurrency cap, answer
persistence, and citation-label closure validation, so pipeline code
never talks to a provider directly.
"""

from __future__ import annotations

import logging
import random
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

from litscout.clock import Clock
from litscout.errors import TransientProviderError
from litscout.projects import ProjectStore
from litscout.providers.base import (
    CitationEntry,
    DeepResearchAnswer,
    DeepResearchProvider,
    LLMProvider,
    MetadataProvider,
    PaperMetadata,
    scan_inline_labels,
)
from litscout.providers.prompts import PromptRequest
from litscout.storage import atomic_write_json, read_json

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3

_URL_ID_PATTERNS = (
    (re.compile(r"arxiv\.org/(?:abs|pdf)/([0-9]{4}\.[0-9]{4,5})"), "arxiv:{}"),
    (re.compile(r"semanticscholar\.org/paper/(?:[^/]*/)?([0-9a-f]{8,40})"), "ss:{}"),
    (re.compile(r"aclweb\.org/anthology/([A-Za-z0-9.\-]+)"), "acl:{}"),
    (re.compile(r"aclanthology\.org/([A-Za-z0-9.\-]+)"), "acl:{}"),
    (re.compile(r"acm\.org/doi/(?:abs/|full/)?(10\.\d{4,9}/[^\s?#]+)"), "doi:{}"),
    (re.compile(r"biorxiv\.org/content/(10\.\d{4,9}/[^\sv?#]+)"), "biorxiv:{}"),
)


def paper_id_from_url(url: str) -> str | None:
    """Extract a canonical paper id from a recognized scholarly URL."""
    for pattern, form in _URL_ID_PATTERNS:
        match = pattern.search(url)
        if match:
            return form.format(match.group(1).rstrip("/"))
    return None


class ResearchGateway:
    def __init__(
        self,
        llm: LLMProvider,
        deep_research: DeepResearchProvider,
        metadata: MetadataProvider,
        projects: ProjectStore,
        clock: Clock | None = None,
        max_parallel: int = 4,
        sleeper: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.llm = llm
        self.deep_research = deep_research
        self.metadata = metadata
        self.projects = projects
        self.clock = clock or Clock()
        self.max_parallel = max_parallel
        self._sleep = sleeper
        self._rng = rng or random.Random()
        self._sem = threading.Semaphore(max_parallel)

    # -- retry machinery ----------------------------------------------------

    def _with_retry(self, what: str, call: Callable):
        """Run a provider call with up to 3 attempts and quadratic backoff."""
        for attempt in range(1, MAX_ATTEMPTS + 1):
            try:
                with self._sem:
                    return call()
            except TransientProviderError:
                if attempt == MAX_ATTEMPTS:
                    raise
                delay = attempt * attempt + self._rng.uniform(0, 0.5)
                logger.warning(
                    "%s transient failure (attempt %d/%d); retrying in %.1fs",
                    what,
                    attempt,
                    MAX_ATTEMPTS,
                    delay,
                )
                self._sleep(delay)
        raise AssertionError("unreachable")

    # -- LLM ------------------------------------------------------------------

    def complete(self, request: PromptRequest) -> str:
        return self._with_retry(
            f"llm:{request.template_id.value}", lambda: self.llm.complete(request)
        )

    # -- deep research ---------------------------------------------------------

    def _ingest_answer(self, question_id: str, raw: dict) -> DeepResearchAnswer:
        answer_text = raw.get("answer_text", "")
        labels = {
            label: CitationEntry.from_record(entry)
            for label, entry in raw.get("citation_labels", {}).items()
        }
        for label in scan_inline_labels(answer_text):
            if label not in labels:
                logger.warning(
                    "dangling citation label %r in answer for %s", label, question_id
                )
                labels[label] = CitationEntry(title=None)
        return DeepResearchAnswer(
            question_id=question_id,
            answer_text=answer_text,
            citation_labels=labels,
            retrieved_at=self.clock.now(),
            provider_id=getattr(self.deep_research, "provider_id", ""),
        )

    def _persist_answer(self, project_id: str, answer: DeepResearchAnswer) -> DeepResearchAnswer:
        answer_dir = self.projects.answers_dir(project_id) / answer.question_id
        seq = len(list(answer_dir.glob("*.json"))) + 1 if answer_dir.exists() else 1
        answer.answer_ref = f"{answer.question_id}/{seq}"
        atomic_write_json(answer_dir / f"{seq}.json", answer.to_record())
        return answer

    def query_deep_research(
        self, project_id: str, question_id: str, question_text: str
    ) -> DeepResearchAnswer:
        """Query one question; persist the answer (answers are immutable,
        re-queries append a new one)."""
        raw = self._with_retry(
            "deep_research", lambda: self.deep_research.ask(question_text)
        )
        answer = self._ingest_answer(question_id, raw)
        return self._persist_answer(project_id, answer)

    def query_deep_research_batch(
        self, project_id: str, questions: list[tuple[str, str]]
    ) -> tuple[dict[str, DeepResearchAnswer], dict[str, Exception]]:
        """Fan out (question_id, text) pairs with bounded parallelism and
        join all completions before returning.

        Answers are ingested and persisted in input order after the join,
        so persisted state does not depend on completion order. Failures
        are isolated per question.
        """
        raw_results: dict[str, dict] = {}
        failures: dict[str, Exception] = {}
        if not questions:
            return {}, {}

        def fetch(pair: tuple[str, str]) -> tuple[str, dict | None, Exception | None]:
            qid, text = pair
            try:
                return qid, self._with_retry("deep_research", lambda: self.deep_research.ask(text)), None
            except Exception as exc:  # noqa: BLE001 - isolation contract
                return qid, None, exc

        with ThreadPoolExecutor(max_workers=self.max_parallel) as pool:
            for qid, raw, exc in pool.map(fetch, questions):
                if exc is not None:
                    logger.warning("deep research failed for %s: %s", qid, exc)
                    failures[qid] = exc
                else:
                    raw_results[qid] = raw

        answers: dict[str, DeepResearchAnswer] = {}
        for qid, _text in questions:
            if qid in raw_results:
                answer = self._ingest_answer(qid, raw_results[qid])
                answers[qid] = self._persist_answer(project_id, answer)
        return answers, failures

    def stored_answers(self, project_id: str, question_id: str) -> list[DeepResearchAnswer]:
        """All persisted answers for a question, oldest first."""
        answer_dir = self.projects.answers_dir(project_id) / question_id
        if not answer_dir.exists():
            return []
        out = []
        for path in sorted(answer_dir.glob("*.json"), key=lambda p: int(p.stem)):
            out.append(DeepResearchAnswer.from_record(read_json(path)))
        return out

    # -- scholarly metadata -----------------------------------------------------

    def lookup_paper(self, query: str) -> PaperMetadata | None:
        """Resolve an id, URL, or title to canonical metadata."""
        if not query or not query.strip():
            return None
        query = query.strip()
        if query.startswith(("http://", "https://")):
            paper_id = paper_id_from_url(query)
            if paper_id is None:
                return None
            return self._with_retry("metadata", lambda: self.metadata.lookup_id(paper_id))
        by_id = self._with_retry("metadata", lambda: self.metadata.lookup_id(query))
        if by_id is not None:
            return by_id
        return self._with_retry("metadata", lambda: self.metadata.search_title(query))
