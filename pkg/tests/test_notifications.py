"""Notification rendering, sinks, and retry-then-record-undelivered."""

from __future__ import annotations

import http.server
import json
import threading

from litscout.notifications import FileSink, Notifier, WebhookSink
from litscout.suggestions.models import PaperLabel, ParsedSuggestion, Suggestion


class FakeRun:
    run_id = "run-000001"


def make_suggestions(n):
    return [
        Suggestion.from_parsed(
            "q-1",
            ParsedSuggestion(
                title=f"Title {i}", text=f"Body {i}.", papers=[PaperLabel("1")], info=""
            ),
        )
        for i in range(n)
    ]


class TestFileSink:
    def test_line_parses_back_with_count(self, harness):
        harness.make_project("proj1", name="My project")
        notifier = Notifier(
            FileSink(harness.projects),
            harness.projects,
            harness.clock,
            dashboard_base_url="http://localhost:9999",
        )
        delivered = make_suggestions(12)
        assert notifier.notify("proj1", FakeRun(), delivered) is True
        lines = harness.projects.notifications_path.read_text().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert record["new_suggestion_count"] == 12
        assert record["project_id"] == "proj1"
        assert record["run_id"] == "run-000001"
        assert record["dashboard_url"] == "http://localhost:9999/projects/proj1"
        assert record["sink_kind"] == "file"
        # Message carries titles and the dashboard link.
        assert "Title 0" in record["body"]
        assert record["dashboard_url"] in record["body"]

    def test_empty_delivery_sends_nothing(self, harness):
        harness.make_project("proj1")
        notifier = Notifier(FileSink(harness.projects), harness.projects, harness.clock)
        assert notifier.notify("proj1", FakeRun(), []) is False
        assert not harness.projects.notifications_path.exists()


class TestWebhookSink:
    def _server(self, status_sequence, received):
        class Handler(http.server.BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = self.rfile.read(length)
                status = status_sequence.pop(0) if status_sequence else 200
                if status == 200:
                    received.append(json.loads(body))
                self.send_response(status)
                self.send_header("Content-Length", "0")
                self.end_headers()

            def log_message(self, *args):
                pass

        server = http.server.HTTPServer(("127.0.0.1", 0), Handler)
        threading.Thread(target=server.serve_forever, daemon=True).start()
        return server

    def test_webhook_delivers(self, harness):
        harness.make_project("proj1")
        received = []
        server = self._server([], received)
        try:
            notifier = Notifier(
                WebhookSink(f"http://127.0.0.1:{server.server_address[1]}/hook"),
                harness.projects,
                harness.clock,
            )
            assert notifier.notify("proj1", FakeRun(), make_suggestions(2)) is True
            assert received[0]["new_suggestion_count"] == 2
        finally:
            server.shutdown()

    def test_three_500s_record_undelivered(self, harness, caplog):
        harness.make_project("proj1")
        received = []
        server = self._server([500, 500, 500], received)
        try:
            notifier = Notifier(
                WebhookSink(f"http://127.0.0.1:{server.server_address[1]}/hook"),
                harness.projects,
                harness.clock,
            )
            with caplog.at_level("WARNING"):
                sent = notifier.notify("proj1", FakeRun(), make_suggestions(1))
            assert sent is False
            assert received == []
            assert sum(
                "delivery failed" in r.message for r in caplog.records
            ) == 3
        finally:
            server.shutdown()

    def test_retry_succeeds_on_third_attempt(self, harness):
        harness.make_project("proj1")
        received = []
        server = self._server([500, 500], received)
        try:
            notifier = Notifier(
                WebhookSink(f"http://127.0.0.1:{server.server_address[1]}/hook"),
                harness.projects,
                harness.clock,
            )
            assert notifier.notify("proj1", FakeRun(), make_suggestions(1)) is True
            assert len(received) == 1
        finally:
            server.shutdown()


class TestMessageRendering:
    def test_titles_capped_with_more_line(self, harness):
        harness.make_project("proj1", name="Big batch")
        notifier = Notifier(FileSink(harness.projects), harness.projects, harness.clock)
        notification = notifier.render("proj1", "run-000001", make_suggestions(12))
        assert notification.body.count("- Title") == 5
        assert "... and 7 more" in notification.body
        assert notification.subject == "12 new suggestions for Big batch"
