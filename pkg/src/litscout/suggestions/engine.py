"""Suggestion generation, label validation, ranking, and seen-set dedup."""

from __future__ import annotations

import json
import logging
import re

from litscout.analysis import ProjectStateAssessment, ResearchQuestion
from litscout.errors import OutputParseError, ValidationFailure
from litscout.jsontools import strip_scratchpad
from litscout.projects import ProjectStore
from litscout.providers.base import DeepResearchAnswer, scan_inline_labels
from litscout.providers.gateway import ResearchGateway
from litscout.providers.prompts import TemplateId, build_request
from litscout.storage import append_lines, read_lines
from litscout.suggestions.models import GenerationResult, Suggestion
from litscout.suggestions.parser import parse_generation_output

logger = logging.getLogger(__name__)

DEFAULT_TOP_N = 12


def render_citation_labels(answer: DeepResearchAnswer) -> str:
    table = {label: entry.to_record() for label, entry in answer.citation_labels.items()}
    return json.dumps(table, sort_keys=True, ensure_ascii=False, indent=2)


def generate_suggestions(
    question: ResearchQuestion,
    answer: DeepResearchAnswer,
    annotated_text: str,
    assessment: ProjectStateAssessment,
    gateway: ResearchGateway,
) -> GenerationResult:
    """Turn a deep-research answer into a summary plus suggestions.

    Unparseable output is retried once; a second failure propagates so
    the run can mark the question answered-without-suggestions.
    """
    request = build_request(
        TemplateId.SUGGESTION_GENERATION,
        {
            "question": question.text,
            "question_explanation": question.explanation,
            "answer": answer.answer_text,
            "citation_labels": render_citation_labels(answer),
            "doc": annotated_text,
            "project_state": assessment.state_label,
            "why_project_state": assessment.rationale,
        },
    )
    try:
        parsed = parse_generation_output(gateway.complete(request))
    except OutputParseError:
        logger.warning(
            "generation output unparseable for %s; retrying once", question.question_id
        )
        parsed = parse_generation_output(gateway.complete(request))

    suggestions = [Suggestion.from_parsed(question.question_id, p) for p in parsed.suggestions]
    for suggestion in suggestions:
        suggestion.answer_ref = answer.answer_ref
    result = GenerationResult(
        question_id=question.question_id,
        summary=parsed.summary,
        suggestions=suggestions,
    )
    return validate_citation_labels(result, answer)


def _strip_unknown_labels(text: str, known: set[str]) -> str:
    """Remove unknown labels from inline [label] citations, keeping known ones."""

    def replace(match: re.Match) -> str:
        parts = [p.strip() for p in match.group(1).split(",")]
        kept = [p for p in parts if p in known]
        return f"[{', '.join(kept)}]" if kept else ""

    cleaned = re.sub(r"\[([^\[\]]+)\]", replace, text)
    return re.sub(r"[ \t]+(?=[.,;)])", "", re.sub(r"[ \t]{2,}", " ", cleaned))


def validate_citation_labels(
    result: GenerationResult, answer: DeepResearchAnswer
) -> GenerationResult:
    """Enforce label closure against the answer's citation table.

    Suggestions with no labels or any unknown label are dropped; unknown
    labels in the summary are stripped but the summary survives.
    """
    known = set(answer.citation_labels.keys())
    kept = []
    for suggestion in result.suggestions:
        labels = [p.label for p in suggestion.papers]
        if not labels:
            logger.warning("dropping suggestion without paper labels: %r", suggestion.title)
            continue
        unknown = [label for label in labels if label not in known]
        unknown += [
            label
            for label in scan_inline_labels(suggestion.text + " " + suggestion.info)
            if label not in known
        ]
        if unknown:
            logger.warning(
                "dropping suggestion %r with unknown labels %s", suggestion.title, unknown
            )
            continue
        kept.append(suggestion)

    summary = result.summary
    unknown_in_summary = [l for l in scan_inline_labels(summary) if l not in known]
    if unknown_in_summary:
        logger.warning("stripping unknown summary labels %s", unknown_in_summary)
        summary = _strip_unknown_labels(summary, known)

    return GenerationResult(
        question_id=result.question_id, summary=summary, suggestions=kept
    )


def render_recommendations(batch: list[Suggestion]) -> str:
    return "\n\n".join(f"{i + 1}. {s.text}" for i, s in enumerate(batch))


_RECOMMENDATION_RE = re.compile(r"^\s*Recommendation:\s*(.*)$")
_RANK_HEADER_RE = re.compile(r"^\s*\*\*\d+\.")


def _parse_ranked_texts(response: str) -> list[str]:
    """Pull the text after each ``Recommendation:`` marker, allowing the
    recommendation to continue until the next rank header or blank line."""
    lines = response.splitlines()
    out: list[str] = []
    collecting: list[str] | None = None
    for line in lines:
        marker = _RECOMMENDATION_RE.match(line)
        if marker:
            if collecting is not None:
                out.append("\n".join(collecting).strip())
            collecting = [marker.group(1)]
            continue
        if collecting is not None:
            if not line.strip() or _RANK_HEADER_RE.match(line):
                out.append("\n".join(collecting).strip())
                collecting = None
            else:
                collecting.append(line)
    if collecting is not None:
        out.append("\n".join(collecting).strip())
    return [text for text in out if text]


def rank_suggestions(
    annotated_text: str,
    assessment: ProjectStateAssessment,
    batch: list[Suggestion],
    gateway: ResearchGateway,
    top_n: int = DEFAULT_TOP_N,
) -> list[Suggestion]:
    """Rank a batch with the ranking prompt and keep the top entries.

    The output must be a permutation of the input: ranked entries are
    matched verbatim against input texts; unmatched entries are dropped,
    and if fewer than half of the batch matched, the model output is
    distrusted entirely and input order is used.
    """
    if not batch:
        raise ValidationFailure("batch must be non-empty")
    request = build_request(
        TemplateId.SUGGESTION_RANKING,
        {
            "doc": annotated_text,
            "project_state": assessment.state_label,
            "recommendations": render_recommendations(batch),
        },
    )
    response = strip_scratchpad(gateway.complete(request))

    by_text: dict[str, list[Suggestion]] = {}
    for suggestion in batch:
        by_text.setdefault(suggestion.text.strip(), []).append(suggestion)

    ranked: list[Suggestion] = []
    for text in _parse_ranked_texts(response):
        bucket = by_text.get(text.strip())
        if not bucket:
            logger.warning("dropping non-verbatim ranked entry: %r", text[:120])
            continue
        ranked.append(bucket.pop(0))

    if len(ranked) < len(batch) / 2:
        logger.warning(
            "only %d/%d ranked entries matched; falling back to input order",
            len(ranked),
            len(batch),
        )
        ranked = list(batch)

    ranked = ranked[:top_n]
    for i, suggestion in enumerate(ranked):
        suggestion.rank = i + 1
    return ranked


# -- seen-set -----------------------------------------------------------------


def load_seen_hashes(projects: ProjectStore, project_id: str) -> set[str]:
    return set(read_lines(projects.seen_hashes_path(project_id)))


def dedup_seen(
    projects: ProjectStore, project_id: str, batch: list[Suggestion]
) -> list[Suggestion]:
    """Drop suggestions whose content hash was already delivered."""
    seen = load_seen_hashes(projects, project_id)
    return [s for s in batch if s.content_hash not in seen]


def mark_delivered(
    projects: ProjectStore, project_id: str, delivered: list[Suggestion]
) -> None:
    """Record delivered content hashes; the seen-set only ever grows here."""
    seen = load_seen_hashes(projects, project_id)
    new = []
    for suggestion in delivered:
        if suggestion.content_hash not in seen:
            seen.add(suggestion.content_hash)
            new.append(suggestion.content_hash)
    append_lines(projects.seen_hashes_path(project_id), new)
