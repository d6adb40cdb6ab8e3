"""The update workflow: one end-to-end pipeline execution per project.

A run snapshots the document, refreshes the paper catalog, re-assesses
the project, selects and issues questions, distills answers into ranked,
deduplicated, anchored suggestions, re-queries tracked questions and
diffs their answers, then delivers and notifies. Per-question provider
failures degrade the run to partial; a failure before any question was
answered fails the run. Runs are append-only and mutually exclusive per
project.
"""

from __future__ import annotations

import logging
import os
import threading
from dataclasses import dataclass, field
from datetime import timedelta
from enum import Enum
from typing import Callable

from pydantic import BaseModel, ValidationError

from litscout.analysis import (
    AnalysisStore,
    QuestionOrigin,
    QuestionStatus,
    ResearchQuestion,
    assess_project,
    select_questions,
)
from litscout.anchors import anchor_suggestions, attach_verified_anchors
from litscout.clock import Clock, isoformat_utc, parse_utc
from litscout.documents.store import DocumentStore
from litscout.errors import (
    LitscoutError,
    NoBaselineAnswerError,
    OutputParseError,
    RunInFlightError,
    UnknownQuestionError,
)
from litscout.jsontools import extract_json_object
from litscout.papers import PaperCatalog, annotate_document
from litscout.projects import ProjectStore
from litscout.providers.base import DeepResearchAnswer
from litscout.providers.gateway import ResearchGateway
from litscout.providers.prompts import TemplateId, build_request
from litscout.storage import append_jsonl, atomic_write_json, read_json
from litscout.suggestions.engine import (
    DEFAULT_TOP_N,
    dedup_seen,
    generate_suggestions,
    mark_delivered,
    rank_suggestions,
)
from litscout.suggestions.models import Suggestion, content_hash_for, suggestion_id_for

logger = logging.getLogger(__name__)

LOCK_STALE_AFTER = timedelta(minutes=30)


class RunTrigger(str, Enum):
    SCHEDULED = "scheduled"
    MANUAL = "manual"


class RunStatus(str, Enum):
    SUCCEEDED = "succeeded"
    PARTIAL = "partial"
    FAILED = "failed"


@dataclass
class DiffResult:
    question_id: str
    old_answer_ref: str
    new_answer_ref: str
    has_meaningful_diff: bool
    suggestions: list[dict] = field(default_factory=list)  # {title, text, info}

    def to_record(self) -> dict:
        return {
            "question_id": self.question_id,
            "old_answer_ref": self.old_answer_ref,
            "new_answer_ref": self.new_answer_ref,
            "has_meaningful_diff": self.has_meaningful_diff,
            "suggestions": self.suggestions,
        }


@dataclass
class UpdateRun:
    run_id: str
    project_id: str
    trigger: RunTrigger
    change_reason: str | None
    input_revision_id: int | None
    input_state: str | None
    questions_issued: list[str] = field(default_factory=list)
    suggestions_delivered: list[str] = field(default_factory=list)
    diff_results: list[DiffResult] = field(default_factory=list)
    notification_sent: bool = False
    started_at: str = ""
    finished_at: str = ""
    status: RunStatus = RunStatus.FAILED
    errors: list[str] = field(default_factory=list)
    recorded_last_modified: str | None = None
    recorded_content_hash: str | None = None
    recorded_state_label: str | None = None

    def to_record(self) -> dict:
        return {
            "run_id": self.run_id,
            "project_id": self.project_id,
            "trigger": self.trigger.value,
            "change_reason": self.change_reason,
            "input_revision_id": self.input_revision_id,
            "input_state": self.input_state,
            "questions_issued": self.questions_issued,
            "suggestions_delivered": self.suggestions_delivered,
            "diff_results": [d.to_record() for d in self.diff_results],
            "notification_sent": self.notification_sent,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "status": self.status.value,
            "errors": self.errors,
            "recorded_last_modified": self.recorded_last_modified,
            "recorded_content_hash": self.recorded_content_hash,
            "recorded_state_label": self.recorded_state_label,
        }


class _DiffItem(BaseModel):
    title: str
    text: str
    info: str = ""


class _DiffOutput(BaseModel):
    has_meaningful_diff: bool
    suggestions: list[_DiffItem] = []


def diff_answers(
    question: ResearchQuestion,
    old_answer: DeepResearchAnswer,
    new_answer: DeepResearchAnswer,
    state_label: str,
    gateway: ResearchGateway,
) -> DiffResult:
    """Compare consecutive answers for a tracked question.

    Schema violations (after one retry) are treated as no-diff: a flaky
    comparison must not fabricate updates.
    """
    request = build_request(
        TemplateId.ANSWER_DIFF,
        {
            "question": question.text,
            "project_state": state_label,
            "old_answer": old_answer.answer_text,
            "new_answer": new_answer.answer_text,
        },
    )

    def parse(raw: str) -> _DiffOutput:
        try:
            return _DiffOutput.model_validate(extract_json_object(raw))
        except ValidationError as exc:
            raise OutputParseError(str(exc)) from exc

    try:
        try:
            output = parse(gateway.complete(request))
        except OutputParseError:
            logger.warning("diff output unparseable for %s; retrying once", question.question_id)
            output = parse(gateway.complete(request))
    except (OutputParseError, LitscoutError) as exc:
        logger.warning("diff failed for %s; treating as no-diff: %s", question.question_id, exc)
        output = _DiffOutput(has_meaningful_diff=False, suggestions=[])

    suggestions = (
        [item.model_dump() for item in output.suggestions]
        if output.has_meaningful_diff
        else []
    )
    return DiffResult(
        question_id=question.question_id,
        old_answer_ref=old_answer.answer_ref,
        new_answer_ref=new_answer.answer_ref,
        has_meaningful_diff=output.has_meaningful_diff,
        suggestions=suggestions,
    )


class ProjectLock:
    """Per-project mutual exclusion: in-process lock plus a persisted lock
    file with a staleness timeout for crash recovery."""

    def __init__(self, projects: ProjectStore, clock: Clock):
        self.projects = projects
        self.clock = clock
        self._guard = threading.Lock()
        self._held: set[str] = set()

    def acquire(self, project_id: str) -> None:
        path = self.projects.lock_path(project_id)
        with self._guard:
            if project_id in self._held:
                raise RunInFlightError(f"run already in flight for {project_id}")
            existing = read_json(path)
            if existing is not None:
                acquired_at = parse_utc(existing["acquired_at"])
                if self.clock.now() - acquired_at < LOCK_STALE_AFTER:
                    raise RunInFlightError(f"run already in flight for {project_id}")
                logger.warning("breaking stale run lock for %s", project_id)
            atomic_write_json(
                path, {"acquired_at": isoformat_utc(self.clock.now()), "pid": os.getpid()}
            )
            self._held.add(project_id)

    def release(self, project_id: str) -> None:
        with self._guard:
            self._held.discard(project_id)
            self.projects.lock_path(project_id).unlink(missing_ok=True)

    def is_held(self, project_id: str) -> bool:
        with self._guard:
            if project_id in self._held:
                return True
            existing = read_json(self.projects.lock_path(project_id))
            if existing is None:
                return False
            return self.clock.now() - parse_utc(existing["acquired_at"]) < LOCK_STALE_AFTER


class UpdateRunner:
    def __init__(
        self,
        projects: ProjectStore,
        documents: DocumentStore,
        catalog: PaperCatalog,
        analysis: AnalysisStore,
        gateway: ResearchGateway,
        clock: Clock,
        question_count: int = 12,
        suggestion_count: int = DEFAULT_TOP_N,
        notify: Callable[[str, "UpdateRun", list[Suggestion]], bool] | None = None,
    ):
        self.projects = projects
        self.documents = documents
        self.catalog = catalog
        self.analysis = analysis
        self.gateway = gateway
        self.clock = clock
        self.question_count = question_count
        self.suggestion_count = suggestion_count
        self.notify = notify
        self.lock = ProjectLock(projects, clock)

    # -- tracking ---------------------------------------------------------

    def set_tracked(self, project_id: str, question_id: str, tracked: bool) -> ResearchQuestion:
        question = self.analysis.get_question(project_id, question_id)
        if tracked and not self.gateway.stored_answers(project_id, question_id):
            raise NoBaselineAnswerError(
                f"question {question_id} has no answer yet; answer it before tracking"
            )
        question.tracked = tracked
        self.analysis.update_question(project_id, question)
        return question

    # -- run workflow -------------------------------------------------------

    def next_run_id(self, project_id: str) -> str:
        run_ids = self.projects.list_run_ids(project_id)
        if not run_ids:
            return "run-000001"
        last = max(int(r.split("-")[1]) for r in run_ids)
        return f"run-{last + 1:06d}"

    def run_update(
        self,
        project_id: str,
        trigger: RunTrigger = RunTrigger.MANUAL,
        change_reason: str | None = None,
    ) -> UpdateRun:
        project = self.projects.get_project(project_id)
        self.lock.acquire(project_id)
        try:
            return self._execute(project_id, project.question_count, trigger, change_reason)
        finally:
            self.lock.release(project_id)

    def _execute(
        self,
        project_id: str,
        question_count_override: int | None,
        trigger: RunTrigger,
        change_reason: str | None,
    ) -> UpdateRun:
        run = UpdateRun(
            run_id=self.next_run_id(project_id),
            project_id=project_id,
            trigger=trigger,
            change_reason=change_reason,
            input_revision_id=None,
            input_state=None,
            started_at=isoformat_utc(self.clock.now()),
        )
        delivered: list[Suggestion] = []
        try:
            delivered = self._pipeline(run, question_count_override or self.question_count)
        except LitscoutError as exc:
            logger.error("run %s failed: %s", run.run_id, exc)
            run.errors.append(str(exc))
            run.status = RunStatus.FAILED
        run.finished_at = isoformat_utc(self.clock.now())
        atomic_write_json(
            self.projects.runs_dir(run.project_id) / f"{run.run_id}.json", run.to_record()
        )
        if delivered and self.notify is not None:
            # Notification failure is recorded, not raised.
            run.notification_sent = self.notify(project_id, run, delivered)
            atomic_write_json(
                self.projects.runs_dir(run.project_id) / f"{run.run_id}.json",
                run.to_record(),
            )
        return run

    def _pipeline(self, run: UpdateRun, question_count: int) -> list[Suggestion]:
        project_id = run.project_id

        # Snapshot and catalog refresh.
        snapshot = self.documents.snapshot(project_id)
        run.input_revision_id = snapshot.revision_id
        run.recorded_last_modified = (
            isoformat_utc(snapshot.last_modified) if snapshot.last_modified else None
        )
        run.recorded_content_hash = snapshot.content_hash
        catalog = self.catalog.refresh(project_id, snapshot.text)
        annotated = annotate_document(snapshot.text, catalog)

        # Assess state; a user override pins the label but rationale refreshes.
        previous = self.analysis.load_assessment(project_id)
        override = previous.state_label if previous and previous.user_overridden else None
        assessment, candidates = assess_project(
            annotated,
            self.gateway,
            self.clock,
            source_revision_id=snapshot.revision_id,
            override_label=override,
        )
        self.analysis.save_assessment(project_id, assessment)
        run.input_state = assessment.state_label
        run.recorded_state_label = assessment.state_label

        # Select this run's questions; tracked questions ride along separately.
        selected: list[ResearchQuestion] = []
        if candidates:
            selected = select_questions(
                project_id,
                annotated,
                assessment,
                candidates,
                self.gateway,
                self.clock,
                k=question_count,
                source_revision_id=snapshot.revision_id,
            )
        self.analysis.upsert_questions(project_id, selected)

        all_questions = {q.question_id: q for q in self.analysis.load_questions(project_id)}
        tracked = [q for q in all_questions.values() if q.tracked]
        tracked_ids = {q.question_id for q in tracked}
        new_questions = [
            all_questions[q.question_id]
            for q in selected
            if q.question_id not in tracked_ids
        ]
        for question in all_questions.values():
            if (
                question.origin == QuestionOrigin.USER_ADDED
                and question.status == QuestionStatus.PENDING
                and question.question_id not in tracked_ids
                and all(question.question_id != q.question_id for q in new_questions)
            ):
                new_questions.append(question)

        run.questions_issued = [q.question_id for q in new_questions] + [
            q.question_id for q in tracked
        ]

        # Issue new questions with bounded fan-out; failures stay isolated.
        answers, failures = self.gateway.query_deep_research_batch(
            project_id, [(q.question_id, q.text) for q in new_questions]
        )
        for failure_id, exc in failures.items():
            run.errors.append(f"{failure_id}: {exc}")

        pooled: list[Suggestion] = []
        explanations: dict[str, str] = {}
        for question in new_questions:
            answer = answers.get(question.question_id)
            if answer is None:
                continue
            question.status = QuestionStatus.ANSWERED
            self.analysis.update_question(project_id, question)
            try:
                result = generate_suggestions(
                    question, answer, annotated, assessment, self.gateway
                )
            except (OutputParseError, LitscoutError) as exc:
                logger.warning(
                    "question %s answered without suggestions: %s",
                    question.question_id,
                    exc,
                )
                run.errors.append(f"{question.question_id}: {exc}")
                self._save_summary(project_id, question.question_id, None, answer)
                continue
            self._save_summary(project_id, question.question_id, result.summary, answer)
            for suggestion in result.suggestions:
                explanations[suggestion.suggestion_id] = question.explanation
            pooled.extend(result.suggestions)

        ranked: list[Suggestion] = []
        if pooled:
            try:
                ranked = rank_suggestions(
                    annotated, assessment, pooled, self.gateway, top_n=self.suggestion_count
                )
            except LitscoutError as exc:
                # Ranking is an ordering concern; a provider failure here must
                # not throw away generated suggestions. Deliver input order.
                logger.warning("ranking failed, using generation order: %s", exc)
                run.errors.append(f"ranking: {exc}")
                ranked = pooled[: self.suggestion_count]

        # Tracked questions: re-query and diff; meaningful diffs become
        # suggestions that skip ranking but go through dedup + anchoring.
        diff_suggestions: list[Suggestion] = []
        for question in tracked:
            try:
                new_answer = self.gateway.query_deep_research(
                    project_id, question.question_id, question.text
                )
            except LitscoutError as exc:
                logger.warning("tracked re-query failed for %s: %s", question.question_id, exc)
                run.errors.append(f"{question.question_id}: {exc}")
                continue
            history = self.gateway.stored_answers(project_id, question.question_id)
            if len(history) < 2:
                continue
            old_answer = history[-2]
            diff = diff_answers(
                question, old_answer, new_answer, assessment.state_label, self.gateway
            )
            run.diff_results.append(diff)
            for item in diff.suggestions:
                digest = content_hash_for(item["title"], item["text"])
                diff_suggestions.append(
                    Suggestion(
                        suggestion_id=suggestion_id_for(question.question_id, digest),
                        question_id=question.question_id,
                        title=item["title"],
                        text=item["text"],
                        papers=[],
                        info=item.get("info", ""),
                        content_hash=digest,
                        source="answer_diff",
                        answer_ref=new_answer.answer_ref,
                    )
                )

        batch = dedup_seen(self.projects, project_id, ranked + diff_suggestions)

        anchors = anchor_suggestions(
            snapshot.sentences,
            batch,
            self.gateway,
            self.clock,
            explanations=explanations,
            revision_id=snapshot.revision_id,
        )
        attach_verified_anchors(batch, anchors, snapshot.sentences)

        delivered_at = isoformat_utc(self.clock.now())
        for i, suggestion in enumerate(batch):
            suggestion.rank = i + 1
            suggestion.run_id = run.run_id
            suggestion.revision_id = snapshot.revision_id
            suggestion.delivered_at = delivered_at
        if batch:
            append_jsonl(
                self.projects.suggestions_path(project_id),
                [s.to_record() for s in batch],
            )
            mark_delivered(self.projects, project_id, batch)
        run.suggestions_delivered = [s.suggestion_id for s in batch]

        answered_any = bool(answers) or bool(tracked)
        if failures and answered_any:
            run.status = RunStatus.PARTIAL
        elif failures or (new_questions and not answers):
            run.status = RunStatus.FAILED
        else:
            run.status = RunStatus.SUCCEEDED
        return batch

    # -- summaries ------------------------------------------------------------

    def _save_summary(
        self,
        project_id: str,
        question_id: str,
        summary: str | None,
        answer: DeepResearchAnswer,
    ) -> None:
        """Store the per-question summary next to the answer it came from."""
        path = self.projects.project_dir(project_id) / "summaries.json"
        data = read_json(path, default={})
        data[question_id] = {
            "summary": summary,
            "answer_ref": answer.answer_ref,
            "generated_at": isoformat_utc(self.clock.now()),
        }
        atomic_write_json(path, data)

    def load_summary(self, project_id: str, question_id: str) -> dict | None:
        data = read_json(
            self.projects.project_dir(project_id) / "summaries.json", default={}
        )
        return data.get(question_id)

    def get_question_anywhere(self, question_id: str) -> tuple[str, ResearchQuestion]:
        found = self.analysis.find_question(question_id)
        if found is None:
            raise UnknownQuestionError(f"no question {question_id!r}")
        return found
