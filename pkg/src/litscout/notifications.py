"""Notification rendering and delivery sinks.

One notification per run that delivered at least one suggestion; the
message stays short (titles plus a dashboard link) because the substance
lives on the dashboard.
"""

from __future__ import annotations

import logging
import smtplib
from dataclasses import dataclass
from email.message import EmailMessage

import requests

from litscout.clock import Clock, isoformat_utc
from litscout.projects import ProjectStore
from litscout.storage import append_lines, dump_json_line
from litscout.suggestions.models import Suggestion

logger = logging.getLogger(__name__)

MAX_TITLES_IN_MESSAGE = 5


@dataclass
class Notification:
    project_id: str
    run_id: str
    new_suggestion_count: int
    dashboard_url: str
    created_at: str
    sink_kind: str
    subject: str = ""
    body: str = ""

    def to_record(self) -> dict:
        return {
            "project_id": self.project_id,
            "run_id": self.run_id,
            "new_suggestion_count": self.new_suggestion_count,
            "dashboard_url": self.dashboard_url,
            "created_at": self.created_at,
            "sink_kind": self.sink_kind,
            "subject": self.subject,
            "body": self.body,
        }


class FileSink:
    kind = "file"

    def __init__(self, projects: ProjectStore):
        self.projects = projects

    def deliver(self, notification: Notification) -> None:
        append_lines(
            self.projects.notifications_path,
            [dump_json_line(notification.to_record()).rstrip("\n")],
        )


class WebhookSink:
    kind = "webhook"

    def __init__(self, url: str, timeout: float = 10.0):
        self.url = url
        self.timeout = timeout

    def deliver(self, notification: Notification) -> None:
        response = requests.post(
            self.url, json=notification.to_record(), timeout=self.timeout
        )
        response.raise_for_status()


class SmtpSink:
    kind = "smtp"

    def __init__(self, host: str, port: int, sender: str, recipient: str):
        self.host = host
        self.port = port
        self.sender = sender
        self.recipient = recipient

    def deliver(self, notification: Notification) -> None:
        message = EmailMessage()
        message["Subject"] = notification.subject
        message["From"] = self.sender
        message["To"] = self.recipient
        message.set_content(notification.body)
        with smtplib.SMTP(self.host, self.port, timeout=30) as smtp:
            smtp.send_message(message)


class Notifier:
    def __init__(
        self,
        sink,
        projects: ProjectStore,
        clock: Clock,
        dashboard_base_url: str = "http://localhost:8000",
        max_attempts: int = 3,
    ):
        self.sink = sink
        self.projects = projects
        self.clock = clock
        self.dashboard_base_url = dashboard_base_url.rstrip("/")
        self.max_attempts = max_attempts

    def render(self, project_id: str, run_id: str, delivered: list[Suggestion]) -> Notification:
        project = self.projects.get_project(project_id)
        dashboard_url = f"{self.dashboard_base_url}/projects/{project_id}"
        titles = [s.title for s in delivered[:MAX_TITLES_IN_MESSAGE]]
        lines = [f"{len(delivered)} new suggestions for {project.name}:", ""]
        lines += [f"- {title}" for title in titles]
        if len(delivered) > len(titles):
            lines.append(f"... and {len(delivered) - len(titles)} more")
        lines += ["", f"Open the dashboard: {dashboard_url}"]
        return Notification(
            project_id=project_id,
            run_id=run_id,
            new_suggestion_count=len(delivered),
            dashboard_url=dashboard_url,
            created_at=isoformat_utc(self.clock.now()),
            sink_kind=getattr(self.sink, "kind", "file"),
            subject=f"{len(delivered)} new suggestions for {project.name}",
            body="\n".join(lines),
        )

    def notify(self, project_id: str, run, delivered: list[Suggestion]) -> bool:
        """Render and dispatch; never called for empty deliveries."""
        if not delivered:
            return False
        notification = self.render(project_id, run.run_id, delivered)
        for attempt in range(1, self.max_attempts + 1):
            try:
                self.sink.deliver(notification)
                return True
            except Exception as exc:  # noqa: BLE001 - sink errors are retried
                logger.warning(
                    "notification delivery failed (attempt %d/%d): %s",
                    attempt,
                    self.max_attempts,
                    exc,
                )
        logger.error("notification undelivered for run %s", run.run_id)
        return False
