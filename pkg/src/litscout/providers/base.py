"""Provider protocols and the wire-level answer/metadata types."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import Protocol

from litscout.providers.prompts import PromptRequest

# Inline citation labels appear as [label] or [label1, label2] in answer text;
# the label table keys are the bare label strings.
_INLINE_LABEL_RE = re.compile(r"\[([^\[\]]+)\]")


def scan_inline_labels(text: str) -> list[str]:
    """All citation labels referenced inline in a block of text, in order."""
    labels = []
    for group in _INLINE_LABEL_RE.findall(text):
        for part in group.split(","):
            part = part.strip()
            if part:
                labels.append(part)
    return labels


@dataclass
class CitationEntry:
    title: str | None
    paper_id: str | None = None
    url: str | None = None

    def to_record(self) -> dict:
        return {"title": self.title, "paper_id": self.paper_id, "url": self.url}

    @classmethod
    def from_record(cls, record: dict) -> "CitationEntry":
        return cls(
            title=record.get("title"),
            paper_id=record.get("paper_id"),
            url=record.get("url"),
        )


@dataclass
class DeepResearchAnswer:
    question_id: str
    answer_text: str
    citation_labels: dict[str, CitationEntry]
    retrieved_at: datetime
    provider_id: str = ""
    answer_ref: str = ""  # "{question_id}/{seq}", set when persisted

    def to_record(self) -> dict:
        from litscout.clock import isoformat_utc

        return {
            "question_id": self.question_id,
            "answer_text": self.answer_text,
            "citation_labels": {
                label: entry.to_record() for label, entry in self.citation_labels.items()
            },
            "retrieved_at": isoformat_utc(self.retrieved_at),
            "provider_id": self.provider_id,
            "answer_ref": self.answer_ref,
        }

    @classmethod
    def from_record(cls, record: dict) -> "DeepResearchAnswer":
        from litscout.clock import parse_utc

        return cls(
            question_id=record["question_id"],
            answer_text=record["answer_text"],
            citation_labels={
                label: CitationEntry.from_record(entry)
                for label, entry in record.get("citation_labels", {}).items()
            },
            retrieved_at=parse_utc(record["retrieved_at"]),
            provider_id=record.get("provider_id", ""),
            answer_ref=record.get("answer_ref", ""),
        )


@dataclass
class PaperMetadata:
    paper_id: str
    title: str
    url: str | None = None
    abstract: str = ""
    extra: dict = field(default_factory=dict)


class LLMProvider(Protocol):
    def complete(self, request: PromptRequest) -> str: ...


class DeepResearchProvider(Protocol):
    provider_id: str

    def ask(self, question_text: str) -> dict:
        """Return {"answer_text": str, "citation_labels": {label: {...}}}."""
        ...


class MetadataProvider(Protocol):
    def lookup_id(self, paper_id: str) -> PaperMetadata | None: ...

    def search_title(self, title: str) -> PaperMetadata | None: ...
