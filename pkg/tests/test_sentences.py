"""Sentence segmentation: fixed examples against an independent oracle,
plus structural properties under hypothesis."""

from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from litscout.documents.sentences import (
    ABBREVIATIONS,
    SentenceEntry,
    render_numbered,
    segment_sentences,
)


def oracle_boundaries(text: str) -> list[str]:
    """Brute-force re-implementation used only as a test oracle.

    Walks characters, collects plain-text sentences split on terminal
    punctuation + whitespace with the abbreviation guard, treating each
    heading/list line as its own sentence. Returns stripped sentence
    strings in order.
    """
    import re

    heading = re.compile(r"^ {0,3}#{1,6}\s")
    listed = re.compile(r"^\s*(?:[-*+]|\d{1,3}[.)])\s")
    sentences: list[str] = []
    buffer = ""

    def flush_buffer():
        nonlocal buffer
        chunk = ""
        i = 0
        while i < len(buffer):
            ch = buffer[i]
            chunk += ch
            if ch in ".!?" and (i + 1 == len(buffer) or buffer[i + 1].isspace()):
                lowered = chunk.lower().rstrip()
                if ch != "." or not any(lowered.endswith(a) for a in ABBREVIATIONS):
                    if chunk.strip():
                        sentences.append(chunk.strip())
                    chunk = ""
            i += 1
        if chunk.strip():
            sentences.append(chunk.strip())
        buffer = ""

    for line in text.split("\n"):
        if not line.strip():
            flush_buffer()
        elif heading.match(line) or listed.match(line):
            flush_buffer()
            sentences.append(line.strip())
        else:
            buffer += line + "\n"
    flush_buffer()
    return sentences


def contents(entries: list[SentenceEntry]) -> list[str]:
    return [e.content for e in entries]


def test_empty_text_yields_empty_list():
    assert segment_sentences("") == []


def test_three_terminal_punctuations():
    text = "A. B? C!"
    entries = segment_sentences(text)
    assert contents(entries) == oracle_boundaries(text) == ["A.", "B?", "C!"]
    assert [e.index for e in entries] == [0, 1, 2]


def test_abbreviations_do_not_split():
    text = "e.g. metrics from Smith et al. were used."
    entries = segment_sentences(text)
    assert contents(entries) == oracle_boundaries(text)
    assert len(entries) == 1


def test_all_listed_abbreviations_guard():
    for abbr in ("e.g.", "i.e.", "et al.", "Fig.", "vs."):
        text = f"See {abbr} the appendix. Done."
        entries = segment_sentences(text)
        assert len(entries) == 2, abbr
        assert entries[0].content == f"See {abbr} the appendix."


def test_headings_and_list_items_are_own_sentences():
    text = "# Title\n\nBody one. Body two.\n\n- item one does things\n- item two. still one item\n"
    entries = segment_sentences(text)
    assert contents(entries) == oracle_boundaries(text)
    assert entries[0].content == "# Title"
    assert entries[1].content == "Body one."
    assert entries[2].content == "Body two."
    assert entries[3].content == "- item one does things"
    assert entries[4].content == "- item two. still one item"


def test_paragraph_across_lines_is_one_scan_unit():
    text = "First line continues\nonto the second. Then a new one."
    entries = segment_sentences(text)
    assert len(entries) == 2
    assert entries[0].content == "First line continues\nonto the second."


def test_decimal_numbers_do_not_split():
    entries = segment_sentences("Accuracy was 3.14 percent. Next.")
    assert len(entries) == 2


def test_spans_match_content_exactly():
    text = "# H\n\nOne. Two!\n- three\n"
    for entry in segment_sentences(text):
        start, end = entry.span
        assert text[start:end] == entry.content
        assert entry.content == entry.content.strip()


def test_render_numbered():
    entries = segment_sentences("One. Two.")
    assert render_numbered(entries) == "0: One.\n1: Two."


text_strategy = st.text(
    alphabet=st.characters(
        whitelist_categories=("L", "N", "P", "Zs"), whitelist_characters="\n#-. !?"
    ),
    max_size=400,
)


@given(text_strategy)
@settings(max_examples=200, deadline=None)
def test_deterministic_and_well_formed(text: str):
    first = segment_sentences(text)
    second = segment_sentences(text)
    assert first == second

    previous_end = -1
    for i, entry in enumerate(first):
        assert entry.index == i
        start, end = entry.span
        assert 0 <= start < end <= len(text)
        assert start >= previous_end, "spans must not overlap"
        previous_end = end
        assert text[start:end] == entry.content
        assert entry.content.strip()


@given(text_strategy)
@settings(max_examples=200, deadline=None)
def test_every_non_whitespace_char_is_covered(text: str):
    entries = segment_sentences(text)
    covered = [False] * len(text)
    for entry in entries:
        for i in range(*entry.span):
            covered[i] = True
    for i, ch in enumerate(text):
        if not ch.isspace():
            assert covered[i], f"char {i!r} ({ch!r}) not covered"


@given(text_strategy)
@settings(max_examples=150, deadline=None)
def test_matches_oracle_on_sentence_texts(text: str):
    assert contents(segment_sentences(text)) == oracle_boundaries(text)
