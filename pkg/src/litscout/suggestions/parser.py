"""Tolerant parser for the tag-formatted suggestion-generation output.

The output format is a loose XML-ish scaffold, and models get it almost
right: scratchpads before the output, a missing closing tag at the end,
stray whitespace. The parser recovers whatever is unambiguous and only
fails when there is no summary or no well-formed suggestion at all.

``render_generation_output`` is the canonical inverse used by fixtures
and round-trip tests.
"""

from __future__ import annotations

import logging
import re

from litscout.errors import OutputParseError
from litscout.jsontools import strip_scratchpad
from litscout.suggestions.models import PaperLabel, ParsedGeneration, ParsedSuggestion

logger = logging.getLogger(__name__)

_SUGGESTION_SPLIT_RE = re.compile(r"<suggestion>")
_PAPER_RE = re.compile(
    r"<paper(?P<attrs>[^>]*)>(?P<body>.*?)(?:</paper>|(?=<paper)|(?=</papers>)|(?=<info>)|\Z)",
    re.DOTALL,
)
_TO_LOOKUP_ATTR_RE = re.compile(r"to_lookup\s*=\s*\"?'?(true|false)", re.IGNORECASE)
_TO_LOOKUP_MARKER_RE = re.compile(r"\(\s*to[_ ]?lookup[^)]*\)\s*$", re.IGNORECASE)


def _section(block: str, name: str, next_openers: list[str]) -> str | None:
    """Content of <name>...</name>; an unclosed tag is recovered by
    cutting at the next sibling opener (or end of block)."""
    open_tag = f"<{name}>"
    start = block.find(open_tag)
    if start == -1:
        return None
    start += len(open_tag)
    end = block.find(f"</{name}>", start)
    if end == -1:
        candidates = [block.find(opener, start) for opener in next_openers]
        candidates = [c for c in candidates if c != -1]
        end = min(candidates) if candidates else len(block)
    return block[start:end]


def _parse_paper(attrs: str, body: str) -> PaperLabel | None:
    to_lookup = False
    attr_match = _TO_LOOKUP_ATTR_RE.search(attrs)
    if attr_match:
        to_lookup = attr_match.group(1).lower() == "true"
    label = body.strip()
    marker = _TO_LOOKUP_MARKER_RE.search(label)
    if marker:
        to_lookup = True
        label = label[: marker.start()].strip()
    label = label.strip()
    if label.startswith("[") and label.endswith("]"):
        label = label[1:-1].strip()
    if not label:
        return None
    return PaperLabel(label=label, to_lookup=to_lookup)


def _parse_suggestion_block(block: str) -> ParsedSuggestion | None:
    # Cut at the end of this suggestion if the closer is present.
    closer = block.find("</suggestion>")
    if closer != -1:
        block = block[:closer]
    title = _section(block, "title", ["<text>", "<papers>", "<info>"])
    text = _section(block, "text", ["<papers>", "<info>"])
    papers_block = _section(block, "papers", ["<info>"]) or ""
    info = _section(block, "info", []) or ""

    if title is None or text is None:
        return None
    title = title.strip()
    text = text.strip()
    if not title or not text:
        return None

    papers = []
    for match in _PAPER_RE.finditer(papers_block):
        paper = _parse_paper(match.group("attrs"), match.group("body"))
        if paper is not None:
            papers.append(paper)
    return ParsedSuggestion(title=title, text=text, papers=papers, info=info.strip())


def parse_generation_output(raw_text: str) -> ParsedGeneration:
    """Parse the summary-plus-suggestions tag structure.

    Raises OutputParseError when the summary is missing or no suggestion
    block is well-formed (a block needs at least a title and a text).
    """
    if not raw_text or not raw_text.strip():
        raise OutputParseError("empty generation output")
    text = strip_scratchpad(raw_text)
    output_start = text.find("<output>")
    if output_start != -1:
        text = text[output_start + len("<output>") :]
        output_end = text.rfind("</output>")
        if output_end != -1:
            text = text[:output_end]

    summary = _section(text, "summary", ["<suggestions>", "<suggestion>"])
    if summary is None or not summary.strip():
        raise OutputParseError("missing <summary> in generation output")

    suggestions_region = _section(text, "suggestions", [])
    if suggestions_region is None:
        suggestions_region = text
    blocks = _SUGGESTION_SPLIT_RE.split(suggestions_region)[1:]
    suggestions = []
    for block in blocks:
        parsed = _parse_suggestion_block(block)
        if parsed is None:
            logger.warning("skipping malformed suggestion block (%d chars)", len(block))
            continue
        suggestions.append(parsed)
    if not suggestions:
        raise OutputParseError("no well-formed <suggestion> blocks found")
    return ParsedGeneration(summary=summary.strip(), suggestions=suggestions)


def render_generation_output(result: ParsedGeneration) -> str:
    """Canonical renderer; ``parse_generation_output`` round-trips it."""
    parts = ["<output>", "<summary>", result.summary, "</summary>", "", "<suggestions>"]
    for suggestion in result.suggestions:
        parts.append("<suggestion>")
        parts.append(f"<title>{suggestion.title}</title>")
        parts.append(f"<text>{suggestion.text}</text>")
        parts.append("<papers>")
        for paper in suggestion.papers:
            flag = "true" if paper.to_lookup else "false"
            parts.append(f"<paper to_lookup={flag}>{paper.label}</paper>")
        parts.append("</papers>")
        parts.append(f"<info>{suggestion.info}</info>")
        parts.append("</suggestion>")
    parts.append("</suggestions>")
    parts.append("</output>")
    return "\n".join(parts)
