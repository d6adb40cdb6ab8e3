"""Process configuration: config file, environment secrets, defaults."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from litscout.errors import ValidationFailure

ENV_LLM_API_KEY = "LLM_API_KEY"
ENV_DEEP_RESEARCH_API_KEY = "DEEP_RESEARCH_API_KEY"
ENV_METADATA_API_KEY = "METADATA_API_KEY"
ENV_API_TOKEN = "API_TOKEN"


@dataclass
class ProviderConfig:
    mode: str = "replay"  # replay | replay-lenient | http
    endpoint: str | None = None
    fixtures_dir: str | None = None
    record: bool = False  # capture live responses into fixtures_dir


@dataclass
class NotificationConfig:
    sink: str = "file"  # file | webhook | smtp
    webhook_url: str | None = None
    smtp_host: str | None = None
    smtp_port: int = 25
    smtp_sender: str | None = None
    smtp_recipient: str | None = None


@dataclass
class AppConfig:
    data_dir: Path = Path("data")
    fixtures_dir: Path = Path("fixtures")
    tick_interval_seconds: float = 3600.0
    question_count: int = 12
    suggestion_count: int = 12
    max_parallel_requests: int = 4
    max_concurrent_runs: int = 2
    default_frequency: str = "biweekly"
    dashboard_base_url: str = "http://localhost:8000"
    host: str = "127.0.0.1"
    port: int = 8000
    frozen_time: str | None = None  # ISO timestamp; pins the clock for replay runs
    llm: ProviderConfig = field(default_factory=ProviderConfig)
    deep_research: ProviderConfig = field(default_factory=ProviderConfig)
    metadata: ProviderConfig = field(default_factory=ProviderConfig)
    notification: NotificationConfig = field(default_factory=NotificationConfig)

    @property
    def api_token(self) -> str | None:
        return os.environ.get(ENV_API_TOKEN)


def _provider_config(data: dict | None, fixtures_dir: Path) -> ProviderConfig:
    data = data or {}
    return ProviderConfig(
        mode=data.get("mode", "replay"),
        endpoint=data.get("endpoint"),
        fixtures_dir=data.get("fixtures_dir", str(fixtures_dir)),
        record=bool(data.get("record", False)),
    )


def load_config(path: Path | str | None = None) -> AppConfig:
    """Load config from a YAML file; unset keys fall back to defaults."""
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ValidationFailure(f"config file not found: {path}")
        loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        if loaded is not None:
            if not isinstance(loaded, dict):
                raise ValidationFailure("config file must hold a mapping")
            data = loaded

    fixtures_dir = Path(data.get("fixtures_dir", "fixtures"))
    notification_data = data.get("notification", {}) or {}
    return AppConfig(
        data_dir=Path(data.get("data_dir", "data")),
        fixtures_dir=fixtures_dir,
        tick_interval_seconds=float(data.get("tick_interval_seconds", 3600.0)),
        question_count=int(data.get("question_count", 12)),
        suggestion_count=int(data.get("suggestion_count", 12)),
        max_parallel_requests=int(data.get("max_parallel_requests", 4)),
        max_concurrent_runs=int(data.get("max_concurrent_runs", 2)),
        default_frequency=data.get("default_frequency", "biweekly"),
        dashboard_base_url=data.get("dashboard_base_url", "http://localhost:8000"),
        host=data.get("host", "127.0.0.1"),
        port=int(data.get("port", 8000)),
        frozen_time=data.get("frozen_time"),
        llm=_provider_config(data.get("llm"), fixtures_dir),
        deep_research=_provider_config(data.get("deep_research"), fixtures_dir),
        metadata=_provider_config(data.get("metadata"), fixtures_dir),
        notification=NotificationConfig(
            sink=notification_data.get("sink", "file"),
            webhook_url=notification_data.get("webhook_url"),
            smtp_host=notification_data.get("smtp_host"),
            smtp_port=int(notification_data.get("smtp_port", 25)),
            smtp_sender=notification_data.get("smtp_sender"),
            smtp_recipient=notification_data.get("smtp_recipient"),
        ),
    )
