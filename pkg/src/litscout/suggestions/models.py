"""Suggestion domain types.

``ParsedGeneration``/``ParsedSuggestion`` are the raw parser output;
``Suggestion`` is the persisted unit with identity, ranking, and anchor.
Content hashing normalizes case and whitespace so trivially reworded
repeats still hash apart while formatting noise does not.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field


@dataclass(frozen=True)
class PaperLabel:
    label: str
    to_lookup: bool = False

    def to_record(self) -> dict:
        return {"label": self.label, "to_lookup": self.to_lookup}

    @classmethod
    def from_record(cls, record: dict) -> "PaperLabel":
        return cls(label=record["label"], to_lookup=record.get("to_lookup", False))


@dataclass
class ParsedSuggestion:
    title: str
    text: str
    papers: list[PaperLabel] = field(default_factory=list)
    info: str = ""


@dataclass
class ParsedGeneration:
    summary: str
    suggestions: list[ParsedSuggestion]


@dataclass
class SentenceAnchor:
    suggestion_id: str
    sentence_index: int
    quote: str
    reasoning: str
    location: str
    revision_id: int | None = None

    def to_record(self) -> dict:
        return {
            "suggestion_id": self.suggestion_id,
            "sentence_index": self.sentence_index,
            "quote": self.quote,
            "reasoning": self.reasoning,
            "location": self.location,
            "revision_id": self.revision_id,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SentenceAnchor":
        return cls(
            suggestion_id=record["suggestion_id"],
            sentence_index=record["sentence_index"],
            quote=record["quote"],
            reasoning=record.get("reasoning", ""),
            location=record.get("location", ""),
            revision_id=record.get("revision_id"),
        )


def _normalize_content(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().lower()


def content_hash_for(title: str, text: str) -> str:
    payload = _normalize_content(title) + "\n" + _normalize_content(text)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def suggestion_id_for(question_id: str, content_hash: str) -> str:
    digest = hashlib.sha256(f"{question_id}\n{content_hash}".encode("utf-8")).hexdigest()
    return f"s-{digest[:12]}"


@dataclass
class Suggestion:
    suggestion_id: str
    question_id: str
    title: str
    text: str
    papers: list[PaperLabel]
    info: str
    rank: int | None = None
    content_hash: str = ""
    delivered_at: str | None = None
    anchor: SentenceAnchor | None = None
    run_id: str | None = None
    revision_id: int | None = None
    source: str = "report"  # "report" (from an answer) or "answer_diff"
    answer_ref: str = ""  # "{question_id}/{seq}" of the answer it came from

    @classmethod
    def from_parsed(cls, question_id: str, parsed: ParsedSuggestion) -> "Suggestion":
        digest = content_hash_for(parsed.title, parsed.text)
        return cls(
            suggestion_id=suggestion_id_for(question_id, digest),
            question_id=question_id,
            title=parsed.title,
            text=parsed.text,
            papers=list(parsed.papers),
            info=parsed.info,
            content_hash=digest,
        )

    def to_record(self) -> dict:
        return {
            "suggestion_id": self.suggestion_id,
            "question_id": self.question_id,
            "title": self.title,
            "text": self.text,
            "papers": [p.to_record() for p in self.papers],
            "info": self.info,
            "rank": self.rank,
            "content_hash": self.content_hash,
            "delivered_at": self.delivered_at,
            "anchor": self.anchor.to_record() if self.anchor else None,
            "run_id": self.run_id,
            "revision_id": self.revision_id,
            "source": self.source,
            "answer_ref": self.answer_ref,
        }

    @classmethod
    def from_record(cls, record: dict) -> "Suggestion":
        return cls(
            suggestion_id=record["suggestion_id"],
            question_id=record["question_id"],
            title=record["title"],
            text=record["text"],
            papers=[PaperLabel.from_record(p) for p in record.get("papers", [])],
            info=record.get("info", ""),
            rank=record.get("rank"),
            content_hash=record.get("content_hash", ""),
            delivered_at=record.get("delivered_at"),
            anchor=SentenceAnchor.from_record(record["anchor"]) if record.get("anchor") else None,
            run_id=record.get("run_id"),
            revision_id=record.get("revision_id"),
            source=record.get("source", "report"),
            answer_ref=record.get("answer_ref", ""),
        )


@dataclass
class GenerationResult:
    question_id: str
    summary: str
    suggestions: list[Suggestion]
