"""Suggestion engine: generation, label closure, ranking rules, dedup."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from litscout.analysis import (
    ProjectStateAssessment,
    QuestionOrigin,
    QuestionStatus,
    ResearchQuestion,
)
from litscout.errors import OutputParseError, ValidationFailure
from litscout.providers.base import CitationEntry, DeepResearchAnswer
from litscout.providers.prompts import TemplateId
from litscout.suggestions.engine import (
    dedup_seen,
    generate_suggestions,
    load_seen_hashes,
    mark_delivered,
    rank_suggestions,
    render_citation_labels,
    render_recommendations,
    validate_citation_labels,
)
from litscout.suggestions.models import (
    GenerationResult,
    PaperLabel,
    ParsedGeneration,
    ParsedSuggestion,
    Suggestion,
    content_hash_for,
)
from litscout.suggestions.parser import render_generation_output


def make_question(text="What is known?", explanation="because"):
    return ResearchQuestion(
        question_id="q-1",
        text=text,
        explanation=explanation,
        origin=QuestionOrigin.GENERATED,
        rank=1,
        tracked=False,
        status=QuestionStatus.PENDING,
        created_at="",
        source_revision_id=1,
    )


def make_answer(labels=("1", "2", "3"), text="Findings [1] [2] [3]."):
    return DeepResearchAnswer(
        question_id="q-1",
        answer_text=text,
        citation_labels={l: CitationEntry(title=f"Paper {l}") for l in labels},
        retrieved_at=datetime(2026, 8, 10, tzinfo=timezone.utc),
    )


def assessment():
    return ProjectStateAssessment(
        state_label="Ideation", rationale="why", assessed_at="", source_revision_id=1
    )


def generation_text(suggestions):
    return render_generation_output(ParsedGeneration(summary="Summary [1].", suggestions=suggestions))


def make_suggestion(question_id, title, text, labels=("1",), info="info"):
    parsed = ParsedSuggestion(
        title=title, text=text, papers=[PaperLabel(l) for l in labels], info=info
    )
    return Suggestion.from_parsed(question_id, parsed)


class TestGenerateSuggestions:
    def record_generation(self, harness, question, answer, response):
        harness.record(
            TemplateId.SUGGESTION_GENERATION,
            {
                "question": question.text,
                "question_explanation": question.explanation,
                "answer": answer.answer_text,
                "citation_labels": render_citation_labels(answer),
                "doc": "doc",
                "project_state": "Ideation",
                "why_project_state": "why",
            },
            response,
        )

    def test_three_suggestions_each_with_labels(self, harness):
        question, answer = make_question(), make_answer()
        suggestions = [
            ParsedSuggestion(
                title=f"T{i}", text=f"Body {i} cites [{i + 1}].",
                papers=[PaperLabel(str(i + 1))], info=f"info {i}",
            )
            for i in range(3)
        ]
        self.record_generation(harness, question, answer, generation_text(suggestions))
        result = generate_suggestions(question, answer, "doc", assessment(), harness.gateway)
        assert len(result.suggestions) == 3
        assert all(len(s.papers) >= 1 for s in result.suggestions)
        assert result.summary == "Summary [1]."

    def test_zero_label_suggestions_rejected_at_validation(self, harness):
        question, answer = make_question(), make_answer()
        suggestions = [
            ParsedSuggestion(title="Labelled", text="cites [1]", papers=[PaperLabel("1")], info=""),
            ParsedSuggestion(title="Unlabelled", text="cites nothing", papers=[], info=""),
        ]
        self.record_generation(harness, question, answer, generation_text(suggestions))
        result = generate_suggestions(question, answer, "doc", assessment(), harness.gateway)
        assert [s.title for s in result.suggestions] == ["Labelled"]

    def test_early_pipeline_scale_bounds(self, harness):
        question, answer = make_question(), make_answer()
        suggestions = [
            ParsedSuggestion(
                title=f"S{i}", text=f"Suggestion {i} uses [1].",
                papers=[PaperLabel("1")], info="",
            )
            for i in range(5)
        ]
        self.record_generation(harness, question, answer, generation_text(suggestions))
        result = generate_suggestions(question, answer, "doc", assessment(), harness.gateway)
        assert 3 <= len(result.suggestions) <= 8

    def test_unparseable_output_raises_after_retry(self, harness):
        question, answer = make_question(), make_answer()
        self.record_generation(harness, question, answer, "no tags here")
        with pytest.raises(OutputParseError):
            generate_suggestions(question, answer, "doc", assessment(), harness.gateway)


class TestValidateCitationLabels:
    def test_all_known_unchanged(self):
        result = GenerationResult(
            question_id="q-1",
            summary="Summary [1].",
            suggestions=[make_suggestion("q-1", "T", "uses [1]", labels=("1",))],
        )
        validated = validate_citation_labels(result, make_answer())
        assert len(validated.suggestions) == 1
        assert validated.summary == "Summary [1]."

    def test_unknown_label_drops_suggestion(self, caplog):
        result = GenerationResult(
            question_id="q-1",
            summary="ok",
            suggestions=[
                make_suggestion("q-1", "Good", "uses [1]", labels=("1",)),
                make_suggestion("q-1", "Bad", "uses [7]", labels=("7",)),
            ],
        )
        with caplog.at_level("WARNING"):
            validated = validate_citation_labels(result, make_answer())
        assert [s.title for s in validated.suggestions] == ["Good"]

    def test_unknown_inline_label_in_text_drops_suggestion(self):
        result = GenerationResult(
            question_id="q-1",
            summary="ok",
            suggestions=[make_suggestion("q-1", "Sneaky", "claims [99] support", labels=("1",))],
        )
        validated = validate_citation_labels(result, make_answer())
        assert validated.suggestions == []

    def test_summary_unknown_label_stripped_summary_kept(self):
        result = GenerationResult(
            question_id="q-1",
            summary="Known [1] and unknown [42] appear.",
            suggestions=[make_suggestion("q-1", "T", "uses [2]", labels=("2",))],
        )
        validated = validate_citation_labels(result, make_answer())
        # Independent scan: no unknown labels remain.
        from litscout.providers.base import scan_inline_labels

        remaining = scan_inline_labels(validated.summary)
        assert "42" not in remaining
        assert "1" in remaining
        assert "appear" in validated.summary


class TestRankSuggestions:
    def record_ranking(self, harness, batch, response):
        harness.record(
            TemplateId.SUGGESTION_RANKING,
            {
                "doc": "doc",
                "project_state": "Ideation",
                "recommendations": render_recommendations(batch),
            },
            response,
        )

    def ranking_response(self, ordered):
        lines = ["**Ranking:**", ""]
        for i, suggestion in enumerate(ordered):
            lines += [
                f"**{i + 1}.**",
                "Reasoning: fits the stage.",
                f"Recommendation: {suggestion.text}",
                "",
            ]
        return "\n".join(lines)

    def test_batch_of_one(self, harness):
        batch = [make_suggestion("q-1", "Only", "the only suggestion")]
        self.record_ranking(harness, batch, self.ranking_response(batch))
        ranked = rank_suggestions("doc", assessment(), batch, harness.gateway)
        assert [s.rank for s in ranked] == [1]

    def test_permutation_of_twenty_keeps_top_twelve(self, harness):
        batch = [
            make_suggestion("q-1", f"T{i}", f"Recommendation body number {i}.")
            for i in range(20)
        ]
        reordered = batch[::-1]
        self.record_ranking(harness, batch, self.ranking_response(reordered))
        ranked = rank_suggestions("doc", assessment(), batch, harness.gateway, top_n=12)
        # Multiset containment via content hashes, computed independently.
        batch_hashes = {s.content_hash for s in batch}
        assert all(s.content_hash in batch_hashes for s in ranked)
        assert len(ranked) == 12
        assert [s.text for s in ranked] == [s.text for s in reordered[:12]]
        assert [s.rank for s in ranked] == list(range(1, 13))

    def test_paraphrased_entry_dropped(self, harness, caplog):
        batch = [
            make_suggestion("q-1", "A", "First exact body."),
            make_suggestion("q-1", "B", "Second exact body."),
        ]
        response = "\n".join(
            [
                "**1.**",
                "Recommendation: First exact body.",
                "",
                "**2.**",
                "Recommendation: A liberally reworded second body.",
                "",
            ]
        )
        self.record_ranking(harness, batch, response)
        with caplog.at_level("WARNING"):
            ranked = rank_suggestions("doc", assessment(), batch, harness.gateway)
        assert [s.title for s in ranked] == ["A"]

    def test_under_half_matched_falls_back_to_input_order(self, harness):
        batch = [make_suggestion("q-1", f"T{i}", f"Body {i}.") for i in range(4)]
        response = "**1.**\nRecommendation: Body 2.\n\nnothing else survived"
        self.record_ranking(harness, batch, response)
        ranked = rank_suggestions("doc", assessment(), batch, harness.gateway)
        assert [s.text for s in ranked] == [f"Body {i}." for i in range(4)]

    def test_never_invents_text(self, harness):
        batch = [make_suggestion("q-1", "A", "Original body.")]
        response = "**1.**\nRecommendation: Entirely made up.\n"
        self.record_ranking(harness, batch, response)
        ranked = rank_suggestions("doc", assessment(), batch, harness.gateway)
        assert [s.text for s in ranked] == ["Original body."]  # fallback, not invention

    def test_empty_batch_rejected(self, harness):
        with pytest.raises(ValidationFailure):
            rank_suggestions("doc", assessment(), [], harness.gateway)


class TestDedupSeen:
    def test_empty_seen_set_keeps_batch(self, harness):
        harness.make_project("proj1")
        batch = [make_suggestion("q-1", "A", "body a"), make_suggestion("q-1", "B", "body b")]
        assert dedup_seen(harness.projects, "proj1", batch) == batch

    def test_delivered_rerun_filters_everything(self, harness):
        harness.make_project("proj1")
        batch = [make_suggestion("q-1", "A", "body a"), make_suggestion("q-1", "B", "body b")]
        mark_delivered(harness.projects, "proj1", batch)
        assert dedup_seen(harness.projects, "proj1", batch) == []

    def test_one_word_title_change_is_new(self, harness):
        harness.make_project("proj1")
        original = make_suggestion("q-1", "Adopt benchmark X", "body")
        mark_delivered(harness.projects, "proj1", [original])
        changed = make_suggestion("q-1", "Adopt benchmark Y", "body")
        # Independent hash recomputation confirms inequality.
        assert content_hash_for("Adopt benchmark Y", "body") != original.content_hash
        assert dedup_seen(harness.projects, "proj1", [changed]) == [changed]

    def test_hash_normalizes_whitespace_and_case(self):
        assert content_hash_for("Title  Here", "some   text") == content_hash_for(
            "title here", "Some Text"
        )

    def test_seen_set_grows_only_on_delivery(self, harness):
        harness.make_project("proj1")
        batch = [make_suggestion("q-1", "A", "body a")]
        dedup_seen(harness.projects, "proj1", batch)  # filtering alone adds nothing
        assert load_seen_hashes(harness.projects, "proj1") == set()
        mark_delivered(harness.projects, "proj1", batch)
        assert load_seen_hashes(harness.projects, "proj1") == {batch[0].content_hash}
