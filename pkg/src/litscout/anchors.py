"""Sentence anchoring: link suggestions to document sentences and verify.

The model proposes at most one (sentence_index, quote) per suggestion;
nothing it says is trusted until the quote matches the indexed sentence
byte-for-byte (trailing whitespace aside). Rejected anchors are dropped
and the suggestion ships unanchored — an unverified anchor never
persists.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

from litscout.clock import Clock
from litscout.documents.sentences import SentenceEntry, render_numbered
from litscout.errors import LitscoutError, OutputParseError
from litscout.jsontools import extract_json_object
from litscout.providers.gateway import ResearchGateway
from litscout.providers.prompts import TemplateId, build_request
from litscout.suggestions.models import SentenceAnchor, Suggestion

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnchorRejection:
    reason: str  # index_out_of_range | index_text_mismatch | quote_mismatch


def render_anchor_items(
    suggestions: list[Suggestion], explanations: dict[str, str] | None = None
) -> str:
    items = []
    for suggestion in suggestions:
        item = {
            "id": suggestion.suggestion_id,
            "text": f"{suggestion.title}: {suggestion.text}",
        }
        explanation = (explanations or {}).get(suggestion.suggestion_id)
        if explanation:
            item["explanation"] = explanation
        items.append(item)
    return json.dumps(items, sort_keys=True, ensure_ascii=False, indent=2)


def anchor_suggestions(
    sentences: list[SentenceEntry],
    suggestions: list[Suggestion],
    gateway: ResearchGateway,
    clock: Clock,
    explanations: dict[str, str] | None = None,
    revision_id: int | None = None,
) -> dict[str, list[SentenceAnchor]]:
    """Ask for the single most relevant sentence per suggestion.

    Returns a map with every input suggestion_id present; each match list
    has length 0 or 1. Provider or schema failures degrade to all-empty
    matches rather than failing the run.
    """
    if not suggestions:
        return {}
    request = build_request(
        TemplateId.DOCUMENT_ANCHOR,
        {
            "today": clock.today_str(),
            "document_sentences": render_numbered(sentences),
            "items": render_anchor_items(suggestions, explanations),
        },
    )
    results: dict[str, list[SentenceAnchor]] = {
        s.suggestion_id: [] for s in suggestions
    }
    try:
        data = extract_json_object(gateway.complete(request))
    except (LitscoutError, OutputParseError) as exc:
        logger.warning("anchoring failed, delivering unanchored: %s", exc)
        return results

    for suggestion_id in results:
        entry = data.get(suggestion_id)
        if not isinstance(entry, dict):
            logger.warning("anchor output missing item %s", suggestion_id)
            continue
        matches = entry.get("matches")
        if not isinstance(matches, list) or not matches:
            continue
        if len(matches) > 1:
            logger.warning(
                "anchor output returned %d matches for %s; keeping the first",
                len(matches),
                suggestion_id,
            )
        match = matches[0]
        if not isinstance(match, dict):
            continue
        try:
            anchor = SentenceAnchor(
                suggestion_id=suggestion_id,
                sentence_index=int(match["sentence_index"]),
                quote=str(match["quote"]),
                reasoning=str(match.get("reasoning", "")),
                location=str(match.get("location", "")),
                revision_id=revision_id,
            )
        except (KeyError, TypeError, ValueError):
            logger.warning("malformed anchor match for %s: %r", suggestion_id, match)
            continue
        results[suggestion_id] = [anchor]
    return results


def verify_anchor(
    anchor: SentenceAnchor, sentences: list[SentenceEntry]
) -> AnchorRejection | None:
    """None when the anchor is exact; otherwise the rejection reason."""
    quote = anchor.quote.rstrip()
    if anchor.sentence_index < 0 or anchor.sentence_index >= len(sentences):
        return AnchorRejection("index_out_of_range")
    if quote == sentences[anchor.sentence_index].content.rstrip():
        return None
    if any(quote == sentence.content.rstrip() for sentence in sentences):
        return AnchorRejection("index_text_mismatch")
    return AnchorRejection("quote_mismatch")


def attach_verified_anchors(
    suggestions: list[Suggestion],
    anchors: dict[str, list[SentenceAnchor]],
    sentences: list[SentenceEntry],
) -> None:
    """Attach anchors that survive verification; discard the rest."""
    for suggestion in suggestions:
        suggestion.anchor = None
        for anchor in anchors.get(suggestion.suggestion_id, []):
            rejection = verify_anchor(anchor, sentences)
            if rejection is None:
                suggestion.anchor = anchor
            else:
                logger.warning(
                    "rejecting anchor for %s (%s)",
                    suggestion.suggestion_id,
                    rejection.reason,
                )
