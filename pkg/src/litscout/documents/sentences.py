"""Deterministic sentence segmentation with character offsets.

Suggestion anchors quote whole sentences verbatim and are verified
byte-for-byte against this index, so segmentation must be stable across
runs and platforms: same text in, same spans out, no model involved.

Rules:
- a markdown heading line or list-item line is one sentence;
- inside ordinary text, ``. ! ?`` followed by whitespace ends a sentence,
  unless the text so far ends with a known abbreviation;
- spans are trimmed to non-whitespace boundaries and every non-whitespace
  character of the input is covered by exactly one span.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Abbreviations that do not terminate a sentence despite the period.
ABBREVIATIONS = ("e.g.", "i.e.", "et al.", "fig.", "vs.")

_TERMINALS = ".!?"

_HEADING_RE = re.compile(r"^ {0,3}#{1,6}\s")
_LIST_ITEM_RE = re.compile(r"^\s*(?:[-*+]|\d{1,3}[.)])\s")


@dataclass(frozen=True)
class SentenceEntry:
    """One indexed sentence: ``content == text[span[0]:span[1]]``."""

    index: int
    span: tuple[int, int]
    content: str

    def to_record(self) -> dict:
        return {
            "index": self.index,
            "start": self.span[0],
            "end": self.span[1],
            "content": self.content,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SentenceEntry":
        return cls(
            index=record["index"],
            span=(record["start"], record["end"]),
            content=record["content"],
        )


def _ends_with_abbreviation(text: str, period_pos: int) -> bool:
    head = text[: period_pos + 1].lower()
    return any(head.endswith(abbr) for abbr in ABBREVIATIONS)


def _scan_block(text: str, start: int, end: int) -> list[tuple[int, int]]:
    """Split text[start:end] on terminal punctuation followed by whitespace."""
    spans = []
    seg_start = start
    i = start
    while i < end:
        ch = text[i]
        if ch in _TERMINALS and (i + 1 >= end or text[i + 1].isspace()):
            if ch != "." or not _ends_with_abbreviation(text, i):
                spans.append((seg_start, i + 1))
                seg_start = i + 1
        i += 1
    if seg_start < end:
        spans.append((seg_start, end))
    return spans


def _trim(text: str, start: int, end: int) -> tuple[int, int] | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if end <= start:
        return None
    return start, end


def segment_sentences(text: str) -> list[SentenceEntry]:
    """Segment normalized markdown into indexed sentences.

    Empty input yields an empty list. Indices are contiguous from 0 and
    spans never overlap.
    """
    if not text:
        return []

    raw_spans: list[tuple[int, int]] = []
    pos = 0
    block_start: int | None = None
    length = len(text)

    def flush_block(block_end: int) -> None:
        nonlocal block_start
        if block_start is not None and block_end > block_start:
            raw_spans.extend(_scan_block(text, block_start, block_end))
        block_start = None

    while pos <= length:
        line_end = text.find("\n", pos)
        if line_end == -1:
            line_end = length
        line = text[pos:line_end]
        if not line.strip():
            flush_block(pos)
        elif _HEADING_RE.match(line) or _LIST_ITEM_RE.match(line):
            flush_block(pos)
            raw_spans.append((pos, line_end))
        elif block_start is None:
            block_start = pos
        if line_end >= length:
            flush_block(length)
            break
        pos = line_end + 1

    entries: list[SentenceEntry] = []
    for raw_start, raw_end in raw_spans:
        trimmed = _trim(text, raw_start, raw_end)
        if trimmed is None:
            continue
        start, end = trimmed
        entries.append(
            SentenceEntry(
                index=len(entries), span=(start, end), content=text[start:end]
            )
        )
    return entries


def render_numbered(sentences: list[SentenceEntry]) -> str:
    """Render sentences as ``index: content`` lines for the anchor prompt."""
    return "\n".join(f"{s.index}: {s.content}" for s in sentences)
