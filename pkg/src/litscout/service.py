"""Wire configuration into a running service graph."""

from __future__ import annotations

import os
from dataclasses import dataclass

from litscout.analysis import AnalysisStore
from litscout.clock import Clock, FixedClock, parse_utc
from litscout.config import (
    ENV_DEEP_RESEARCH_API_KEY,
    ENV_LLM_API_KEY,
    ENV_METADATA_API_KEY,
    AppConfig,
    NotificationConfig,
    ProviderConfig,
)
from litscout.documents.store import DocumentStore
from litscout.errors import ValidationFailure
from litscout.notifications import FileSink, Notifier, SmtpSink, WebhookSink
from litscout.papers import PaperCatalog
from litscout.projects import ProjectStore
from litscout.providers.gateway import ResearchGateway
from litscout.providers.http import HttpDeepResearch, HttpLLM, HttpMetadata
from litscout.providers.mock import (
    RecordingDeepResearch,
    RecordingLLM,
    ReplayDeepResearch,
    ReplayLLM,
    ReplayMetadata,
)
from litscout.updates.runs import UpdateRunner
from litscout.updates.scheduler import Heartbeat, SchedulerLoop


def _build_llm(config: ProviderConfig):
    if config.mode == "http":
        if not config.endpoint:
            raise ValidationFailure("llm provider mode 'http' needs an endpoint")
        provider = HttpLLM(config.endpoint, api_key=os.environ.get(ENV_LLM_API_KEY))
        if config.record and config.fixtures_dir:
            return RecordingLLM(provider, config.fixtures_dir)
        return provider
    strict = config.mode != "replay-lenient"
    return ReplayLLM(config.fixtures_dir or "fixtures", strict=strict)


def _build_deep_research(config: ProviderConfig):
    if config.mode == "http":
        if not config.endpoint:
            raise ValidationFailure("deep research mode 'http' needs an endpoint")
        provider = HttpDeepResearch(
            config.endpoint, api_key=os.environ.get(ENV_DEEP_RESEARCH_API_KEY)
        )
        if config.record and config.fixtures_dir:
            return RecordingDeepResearch(provider, config.fixtures_dir)
        return provider
    strict = config.mode != "replay-lenient"
    return ReplayDeepResearch(config.fixtures_dir or "fixtures", strict=strict)


def _build_metadata(config: ProviderConfig):
    if config.mode == "http":
        if not config.endpoint:
            raise ValidationFailure("metadata mode 'http' needs an endpoint")
        return HttpMetadata(config.endpoint, api_key=os.environ.get(ENV_METADATA_API_KEY))
    return ReplayMetadata(config.fixtures_dir or "fixtures")


def _build_sink(config: NotificationConfig, projects: ProjectStore):
    if config.sink == "webhook":
        if not config.webhook_url:
            raise ValidationFailure("webhook sink needs webhook_url")
        return WebhookSink(config.webhook_url)
    if config.sink == "smtp":
        if not (config.smtp_host and config.smtp_sender and config.smtp_recipient):
            raise ValidationFailure("smtp sink needs host, sender, and recipient")
        return SmtpSink(
            config.smtp_host, config.smtp_port, config.smtp_sender, config.smtp_recipient
        )
    return FileSink(projects)


@dataclass
class Services:
    config: AppConfig
    clock: Clock
    projects: ProjectStore
    documents: DocumentStore
    catalog: PaperCatalog
    analysis: AnalysisStore
    gateway: ResearchGateway
    notifier: Notifier
    runner: UpdateRunner
    heartbeat: Heartbeat

    def scheduler_loop(self) -> SchedulerLoop:
        return SchedulerLoop(self.heartbeat, self.config.tick_interval_seconds)


def build_services(config: AppConfig, clock: Clock | None = None) -> Services:
    if clock is None:
        if config.frozen_time:
            clock = FixedClock(parse_utc(config.frozen_time))
        else:
            clock = Clock()
    projects = ProjectStore(config.data_dir)
    documents = DocumentStore(projects, clock)
    gateway = ResearchGateway(
        llm=_build_llm(config.llm),
        deep_research=_build_deep_research(config.deep_research),
        metadata=_build_metadata(config.metadata),
        projects=projects,
        clock=clock,
        max_parallel=config.max_parallel_requests,
    )
    catalog = PaperCatalog(projects, gateway)
    analysis = AnalysisStore(projects, clock)
    notifier = Notifier(
        sink=_build_sink(config.notification, projects),
        projects=projects,
        clock=clock,
        dashboard_base_url=config.dashboard_base_url,
    )
    runner = UpdateRunner(
        projects=projects,
        documents=documents,
        catalog=catalog,
        analysis=analysis,
        gateway=gateway,
        clock=clock,
        question_count=config.question_count,
        suggestion_count=config.suggestion_count,
        notify=notifier.notify,
    )
    heartbeat = Heartbeat(
        projects=projects,
        documents=documents,
        runner=runner,
        clock=clock,
        max_concurrent_runs=config.max_concurrent_runs,
    )
    return Services(
        config=config,
        clock=clock,
        projects=projects,
        documents=documents,
        catalog=catalog,
        analysis=analysis,
        gateway=gateway,
        notifier=notifier,
        runner=runner,
        heartbeat=heartbeat,
    )
