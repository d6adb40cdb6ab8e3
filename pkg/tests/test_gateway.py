"""Provider gateway: replay fixtures, retries, fan-out, label closure."""

from __future__ import annotations

import threading
import time

import pytest

from litscout.errors import AuthenticationError, MissingFixtureError, TransientProviderError
from litscout.providers.base import PaperMetadata
from litscout.providers.gateway import ResearchGateway, paper_id_from_url
from litscout.providers.mock import (
    RecordingLLM,
    ReplayDeepResearch,
    ReplayLLM,
    answer_fixture_path,
    question_hash,
    transcript_fixture_path,
)
from litscout.providers.prompts import TemplateId, build_request


def simple_request(doc="some doc"):
    return build_request(TemplateId.PAPER_EXTRACTION, {"doc": doc})


class TestReplayLLM:
    def test_known_hash_returns_fixture_text(self, harness):
        request = simple_request()
        harness.llm.record(request, "fixture text")
        assert harness.gateway.complete(request) == "fixture text"

    def test_missing_fixture_strict_errors(self, harness):
        with pytest.raises(MissingFixtureError):
            harness.gateway.complete(simple_request("never recorded"))

    def test_fixture_path_layout(self, tmp_path):
        llm = ReplayLLM(tmp_path)
        request = simple_request()
        path = llm.record(request, "x")
        assert path == transcript_fixture_path(tmp_path, request.request_hash)
        assert path.parent.name == "transcripts"
        assert path.suffix == ".txt"

    def test_request_hash_is_deterministic(self):
        a = simple_request("same doc")
        b = simple_request("same doc")
        c = simple_request("other doc")
        assert a.request_hash == b.request_hash
        assert a.request_hash != c.request_hash


class FlakyLLM:
    """Fails with transient errors n times, then succeeds."""

    def __init__(self, failures: int, response: str = "ok"):
        self.failures = failures
        self.response = response
        self.attempts = 0

    def complete(self, request):
        self.attempts += 1
        if self.attempts <= self.failures:
            raise TransientProviderError("try again")
        return self.response


class TestRetries:
    def _gateway(self, harness, llm):
        return ResearchGateway(
            llm=llm,
            deep_research=harness.deep,
            metadata=harness.metadata,
            projects=harness.projects,
            clock=harness.clock,
            sleeper=lambda _s: None,
        )

    def test_two_failures_then_success(self, harness):
        llm = FlakyLLM(failures=2)
        gateway = self._gateway(harness, llm)
        assert gateway.complete(simple_request()) == "ok"
        assert llm.attempts == 3

    def test_exhausted_retries_raise(self, harness):
        llm = FlakyLLM(failures=5)
        gateway = self._gateway(harness, llm)
        with pytest.raises(TransientProviderError):
            gateway.complete(simple_request())
        assert llm.attempts == 3

    def test_auth_failure_not_retried(self, harness):
        class AuthFailLLM:
            attempts = 0

            def complete(self, request):
                self.attempts += 1
                raise AuthenticationError("bad key")

        llm = AuthFailLLM()
        gateway = self._gateway(harness, llm)
        with pytest.raises(AuthenticationError):
            gateway.complete(simple_request())
        assert llm.attempts == 1


class TestRecordMode:
    def test_recording_wrapper_captures_fixture(self, tmp_path):
        class LiveLLM:
            def complete(self, request):
                return "live response"

        recording = RecordingLLM(LiveLLM(), tmp_path)
        request = simple_request()
        assert recording.complete(request) == "live response"
        replay = ReplayLLM(tmp_path)
        assert replay.complete(request) == "live response"


class TestDeepResearch:
    def test_answer_persisted_with_label_table(self, harness):
        harness.make_project("proj1")
        harness.record_answer(
            "What is known?",
            {
                "answer_text": "Findings [1] and more [2, 3].",
                "citation_labels": {
                    "1": {"title": "A"},
                    "2": {"title": "B"},
                    "3": {"title": "C"},
                },
            },
        )
        answer = harness.gateway.query_deep_research("proj1", "q-abc", "What is known?")
        assert set(answer.citation_labels) == {"1", "2", "3"}
        assert answer.answer_ref == "q-abc/1"
        stored = harness.gateway.stored_answers("proj1", "q-abc")
        assert len(stored) == 1
        assert stored[0].answer_text == answer.answer_text

    def test_dangling_label_added_with_null_metadata(self, harness, caplog):
        harness.make_project("proj1")
        harness.record_answer(
            "Dangling?",
            {"answer_text": "Known [1] and dangling [9].", "citation_labels": {"1": {"title": "A"}}},
        )
        with caplog.at_level("WARNING"):
            answer = harness.gateway.query_deep_research("proj1", "q-d", "Dangling?")
        assert "9" in answer.citation_labels
        assert answer.citation_labels["9"].title is None
        assert any("dangling" in r.message for r in caplog.records)

    def test_requery_appends_immutable_answers(self, harness):
        harness.make_project("proj1")
        harness.record_answer("Track me?", {"answer_text": "v1", "citation_labels": {}})
        first = harness.gateway.query_deep_research("proj1", "q-t", "Track me?")
        harness.record_answer("Track me?", {"answer_text": "v2", "citation_labels": {}})
        second = harness.gateway.query_deep_research("proj1", "q-t", "Track me?")
        stored = harness.gateway.stored_answers("proj1", "q-t")
        assert [a.answer_text for a in stored] == ["v1", "v2"]
        assert (first.answer_ref, second.answer_ref) == ("q-t/1", "q-t/2")

    def test_batch_isolates_failures(self, harness):
        harness.make_project("proj1")
        harness.record_answer("Good one?", {"answer_text": "fine", "citation_labels": {}})
        answers, failures = harness.gateway.query_deep_research_batch(
            "proj1", [("q-good", "Good one?"), ("q-bad", "Never recorded?")]
        )
        assert set(answers) == {"q-good"}
        assert set(failures) == {"q-bad"}

    def test_batch_persists_in_input_order(self, harness):
        harness.make_project("proj1")
        for i in range(6):
            harness.record_answer(f"Q{i}?", {"answer_text": f"a{i}", "citation_labels": {}})
        answers, failures = harness.gateway.query_deep_research_batch(
            "proj1", [(f"q-{i}", f"Q{i}?") for i in range(6)]
        )
        assert not failures
        assert [answers[f"q-{i}"].answer_ref for i in range(6)] == [
            f"q-{i}/1" for i in range(6)
        ]

    def test_bounded_parallelism(self, harness):
        in_flight = 0
        peak = 0
        lock = threading.Lock()

        class SlowDeep:
            provider_id = "slow"

            def ask(self, question_text):
                nonlocal in_flight, peak
                with lock:
                    in_flight += 1
                    peak = max(peak, in_flight)
                time.sleep(0.02)
                with lock:
                    in_flight -= 1
                return {"answer_text": "x", "citation_labels": {}}

        harness.make_project("proj1")
        gateway = ResearchGateway(
            llm=harness.llm,
            deep_research=SlowDeep(),
            metadata=harness.metadata,
            projects=harness.projects,
            clock=harness.clock,
            max_parallel=4,
            sleeper=lambda _s: None,
        )
        gateway.query_deep_research_batch(
            "proj1", [(f"q-{i}", f"Q{i}?") for i in range(12)]
        )
        assert peak <= 4

    def test_question_hash_normalizes_whitespace_and_case(self):
        assert question_hash("What  Is\nKnown?") == question_hash("what is known?")

    def test_answer_fixture_path_layout(self, tmp_path):
        deep = ReplayDeepResearch(tmp_path)
        path = deep.record("A question?", {"answer_text": "", "citation_labels": {}})
        assert path == answer_fixture_path(tmp_path, "A question?")
        assert path.parent.name == "deep_research"


class TestMetadataLookup:
    def test_known_title(self, harness):
        harness.add_paper("p1", "A Fine Paper Title")
        found = harness.gateway.lookup_paper("A Fine Paper Title")
        assert found is not None and found.paper_id == "p1"

    def test_unknown_title_not_found(self, harness):
        assert harness.gateway.lookup_paper("gibberish nonsense title") is None

    def test_rate_limited_then_success(self, harness):
        calls = {"n": 0}

        class RateLimited:
            def lookup_id(self, paper_id):
                calls["n"] += 1
                if calls["n"] < 3:
                    raise TransientProviderError("429")
                return PaperMetadata(paper_id=paper_id, title="Recovered")

            def search_title(self, title):
                return None

        gateway = ResearchGateway(
            llm=harness.llm,
            deep_research=harness.deep,
            metadata=RateLimited(),
            projects=harness.projects,
            clock=harness.clock,
            sleeper=lambda _s: None,
        )
        found = gateway.lookup_paper("p42")
        assert found is not None and found.title == "Recovered"
        assert calls["n"] == 3

    def test_url_id_extraction(self):
        assert paper_id_from_url("https://arxiv.org/abs/2403.11111") == "arxiv:2403.11111"
        assert paper_id_from_url("https://arxiv.org/pdf/2403.11111") == "arxiv:2403.11111"
        assert (
            paper_id_from_url("https://www.semanticscholar.org/paper/deadbeef01234567")
            == "ss:deadbeef01234567"
        )
        assert paper_id_from_url("https://dl.acm.org/doi/10.1145/358.359") == "doi:10.1145/358.359"
        assert paper_id_from_url("https://example.org/whatever") is None
