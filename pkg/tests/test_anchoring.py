"""Anchoring: single-sentence linking plus mandatory mechanical verification."""

from __future__ import annotations

import json

from litscout.anchors import (
    anchor_suggestions,
    attach_verified_anchors,
    render_anchor_items,
    verify_anchor,
)
from litscout.documents.sentences import render_numbered, segment_sentences
from litscout.providers.prompts import TemplateId
from litscout.suggestions.models import PaperLabel, ParsedSuggestion, SentenceAnchor, Suggestion

DOC = "\n".join(
    [
        "# Plan",
        "",
        "We evaluate on two assignments this fall.",
        "The metric question is still open.",
        "",
        "## Evaluation criteria",
        "",
        "(to be filled in)",
    ]
)
SENTENCES = segment_sentences(DOC)


def make_suggestion(n):
    return Suggestion.from_parsed(
        "q-1",
        ParsedSuggestion(
            title=f"T{n}", text=f"Suggestion {n}.", papers=[PaperLabel("1")], info=""
        ),
    )


def anchor_payload(mapping):
    return json.dumps(
        {
            sid: {
                "matches": (
                    []
                    if idx is None
                    else [
                        {
                            "sentence_index": idx,
                            "quote": SENTENCES[idx].content,
                            "reasoning": "on point",
                            "location": "Plan",
                        }
                    ]
                )
            }
            for sid, idx in mapping.items()
        }
    )


def record_anchor(harness, batch, response):
    harness.record(
        TemplateId.DOCUMENT_ANCHOR,
        {
            "today": harness.clock.today_str(),
            "document_sentences": render_numbered(SENTENCES),
            "items": render_anchor_items(batch),
        },
        response,
    )


class TestAnchorSuggestions:
    def test_empty_suggestions_empty_map(self, harness):
        assert anchor_suggestions(SENTENCES, [], harness.gateway, harness.clock) == {}

    def test_batch_of_three_all_ids_present_cardinality(self, harness):
        batch = [make_suggestion(i) for i in range(3)]
        mapping = {batch[0].suggestion_id: 1, batch[1].suggestion_id: None, batch[2].suggestion_id: 3}
        record_anchor(harness, batch, anchor_payload(mapping))
        result = anchor_suggestions(SENTENCES, batch, harness.gateway, harness.clock)
        assert set(result) == {s.suggestion_id for s in batch}
        assert all(len(matches) <= 1 for matches in result.values())
        assert len(result[batch[1].suggestion_id]) == 0

    def test_missing_evaluation_suggestion_anchors_to_heading(self, harness):
        batch = [make_suggestion(0)]
        heading_index = next(
            s.index for s in SENTENCES if s.content == "## Evaluation criteria"
        )
        record_anchor(
            harness, batch, anchor_payload({batch[0].suggestion_id: heading_index})
        )
        result = anchor_suggestions(SENTENCES, batch, harness.gateway, harness.clock)
        anchor = result[batch[0].suggestion_id][0]
        assert anchor.quote == "## Evaluation criteria"
        assert verify_anchor(anchor, SENTENCES) is None

    def test_provider_failure_degrades_to_empty_matches(self, harness):
        batch = [make_suggestion(0), make_suggestion(1)]
        # No transcript recorded: strict replay raises inside, anchors degrade.
        result = anchor_suggestions(SENTENCES, batch, harness.gateway, harness.clock)
        assert all(matches == [] for matches in result.values())
        assert set(result) == {s.suggestion_id for s in batch}

    def test_multiple_matches_truncated_to_first(self, harness):
        batch = [make_suggestion(0)]
        sid = batch[0].suggestion_id
        payload = {
            sid: {
                "matches": [
                    {"sentence_index": 1, "quote": SENTENCES[1].content, "reasoning": "r", "location": "l"},
                    {"sentence_index": 2, "quote": SENTENCES[2].content, "reasoning": "r", "location": "l"},
                ]
            }
        }
        record_anchor(harness, batch, json.dumps(payload))
        result = anchor_suggestions(SENTENCES, batch, harness.gateway, harness.clock)
        assert len(result[sid]) == 1
        assert result[sid][0].sentence_index == 1


def make_anchor(index, quote, sid="s-x"):
    return SentenceAnchor(
        suggestion_id=sid, sentence_index=index, quote=quote, reasoning="r", location="l"
    )


class TestVerifyAnchor:
    def test_exact_match_accepted(self):
        anchor = make_anchor(1, SENTENCES[1].content)
        assert verify_anchor(anchor, SENTENCES) is None

    def test_trailing_whitespace_tolerated(self):
        anchor = make_anchor(1, SENTENCES[1].content + "   ")
        assert verify_anchor(anchor, SENTENCES) is None

    def test_off_by_one_index_with_right_text(self):
        anchor = make_anchor(2, SENTENCES[1].content)
        rejection = verify_anchor(anchor, SENTENCES)
        assert rejection is not None and rejection.reason == "index_text_mismatch"

    def test_paraphrased_quote_rejected(self):
        original = SENTENCES[1].content
        mutated = original[:-1] + "!"  # one character differs
        assert mutated != original
        rejection = verify_anchor(make_anchor(1, mutated), SENTENCES)
        assert rejection is not None and rejection.reason == "quote_mismatch"

    def test_out_of_range_rejected(self):
        rejection = verify_anchor(make_anchor(99, "whatever"), SENTENCES)
        assert rejection is not None and rejection.reason == "index_out_of_range"
        rejection = verify_anchor(make_anchor(-1, SENTENCES[0].content), SENTENCES)
        assert rejection is not None and rejection.reason == "index_out_of_range"


class TestAttachVerifiedAnchors:
    def test_only_verified_anchors_attach(self, caplog):
        good, bad = make_suggestion(0), make_suggestion(1)
        anchors = {
            good.suggestion_id: [make_anchor(1, SENTENCES[1].content, good.suggestion_id)],
            bad.suggestion_id: [make_anchor(1, "paraphrased text", bad.suggestion_id)],
        }
        with caplog.at_level("WARNING"):
            attach_verified_anchors([good, bad], anchors, SENTENCES)
        assert good.anchor is not None
        assert bad.anchor is None
        assert any("rejecting anchor" in r.message for r in caplog.records)
