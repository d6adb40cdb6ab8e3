"""Project-state inference and literature-question management.

The analysis prompt returns the inferred stage, the reasoning, and an
ordered list of candidate questions; the ranking prompt then selects a
useful-and-diverse top-k. Selection output is free text, so selected
questions are recovered by verbatim matching against the candidates —
anything the model invented is dropped.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ValidationError

from litscout.clock import Clock, isoformat_utc
from litscout.errors import (
    DuplicateQuestionError,
    OutputParseError,
    UnknownProjectError,
    UnknownQuestionError,
    ValidationFailure,
)
from litscout.jsontools import extract_json_object, strip_scratchpad
from litscout.projects import ProjectStore
from litscout.providers.gateway import ResearchGateway
from litscout.providers.prompts import TemplateId, build_request
from litscout.storage import atomic_write_json, read_json

logger = logging.getLogger(__name__)

STAGE_VOCABULARY = (
    "Ideation",
    "Literature review",
    "Experimental design",
    "Data collection",
    "Running experiments",
    "Data analysis",
    "Paper writing",
)


class QuestionOrigin(str, Enum):
    GENERATED = "generated"
    USER_ADDED = "user_added"


class QuestionStatus(str, Enum):
    PENDING = "pending"
    ANSWERED = "answered"
    RETIRED = "retired"


@dataclass
class ProjectStateAssessment:
    state_label: str
    rationale: str
    assessed_at: str
    source_revision_id: int | None
    user_overridden: bool = False

    def to_record(self) -> dict:
        return {
            "state_label": self.state_label,
            "rationale": self.rationale,
            "assessed_at": self.assessed_at,
            "source_revision_id": self.source_revision_id,
            "user_overridden": self.user_overridden,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ProjectStateAssessment":
        return cls(
            state_label=record["state_label"],
            rationale=record.get("rationale", ""),
            assessed_at=record.get("assessed_at", ""),
            source_revision_id=record.get("source_revision_id"),
            user_overridden=record.get("user_overridden", False),
        )


@dataclass
class CandidateQuestion:
    text: str
    explanation: str


@dataclass
class ResearchQuestion:
    question_id: str
    text: str
    explanation: str
    origin: QuestionOrigin
    rank: int | None
    tracked: bool
    status: QuestionStatus
    created_at: str
    source_revision_id: int | None

    def to_record(self) -> dict:
        return {
            "question_id": self.question_id,
            "text": self.text,
            "explanation": self.explanation,
            "origin": self.origin.value,
            "rank": self.rank,
            "tracked": self.tracked,
            "status": self.status.value,
            "created_at": self.created_at,
            "source_revision_id": self.source_revision_id,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ResearchQuestion":
        return cls(
            question_id=record["question_id"],
            text=record["text"],
            explanation=record.get("explanation", ""),
            origin=QuestionOrigin(record["origin"]),
            rank=record.get("rank"),
            tracked=record.get("tracked", False),
            status=QuestionStatus(record["status"]),
            created_at=record.get("created_at", ""),
            source_revision_id=record.get("source_revision_id"),
        )


def normalize_question(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip().lower()


def question_id_for(project_id: str, text: str) -> str:
    digest = hashlib.sha256(
        f"{project_id}\n{normalize_question(text)}".encode("utf-8")
    ).hexdigest()
    return f"q-{digest[:12]}"


class _AnalysisItem(BaseModel):
    question: str
    explanation: str


class _AnalysisOutput(BaseModel):
    project_state: str
    why_project_state: str
    questions: list[_AnalysisItem]


def _parse_analysis(raw: str) -> _AnalysisOutput:
    data = extract_json_object(raw)
    try:
        return _AnalysisOutput.model_validate(data)
    except ValidationError as exc:
        raise OutputParseError(f"analysis output failed validation: {exc}") from exc


def assess_project(
    annotated_text: str,
    gateway: ResearchGateway,
    clock: Clock,
    source_revision_id: int | None = None,
    override_label: str | None = None,
) -> tuple[ProjectStateAssessment, list[CandidateQuestion]]:
    """Infer the project stage and generate candidate questions.

    When the user has overridden the state, the override label replaces
    the inferred one but the rationale and questions are still fresh.
    """
    if not annotated_text.strip():
        raise ValidationFailure("document text must be non-empty")
    request = build_request(
        TemplateId.DOCUMENT_ANALYSIS,
        {"today": clock.today_str(), "doc": annotated_text},
    )
    try:
        output = _parse_analysis(gateway.complete(request))
    except OutputParseError:
        logger.warning("analysis output unparseable; retrying once")
        output = _parse_analysis(gateway.complete(request))

    assessment = ProjectStateAssessment(
        state_label=override_label if override_label else output.project_state,
        rationale=output.why_project_state,
        assessed_at=isoformat_utc(clock.now()),
        source_revision_id=source_revision_id,
        user_overridden=override_label is not None,
    )
    candidates = [
        CandidateQuestion(text=q.question, explanation=q.explanation)
        for q in output.questions
        if q.question.strip()
    ]
    return assessment, candidates


def render_candidates(candidates: list[CandidateQuestion]) -> str:
    return "\n".join(f"{i + 1}. {c.text}" for i, c in enumerate(candidates))


_NUMBERED_LINE_RE = re.compile(r"^\s*(?:\*\*)?\d+[.)]\s*(.+?)(?:\*\*)?\s*$")


def select_questions(
    project_id: str,
    annotated_text: str,
    assessment: ProjectStateAssessment,
    candidates: list[CandidateQuestion],
    gateway: ResearchGateway,
    clock: Clock,
    k: int,
    source_revision_id: int | None = None,
) -> list[ResearchQuestion]:
    """Select up to k candidates, ranked, via the ranking prompt.

    Selected questions must equal a candidate verbatim; the response is
    scanned for candidate texts and ranked by first occurrence. If the
    model returned nothing usable, the first k candidates in generation
    order are used instead.
    """
    if not candidates:
        raise ValidationFailure("candidates must be non-empty")
    if k < 1:
        raise ValidationFailure("k must be >= 1")

    request = build_request(
        TemplateId.QUESTION_RANKING,
        {
            "doc": annotated_text,
            "project_state": assessment.state_label,
            "why_project_state": assessment.rationale,
            "questions": render_candidates(candidates),
        },
    )
    response = strip_scratchpad(gateway.complete(request))

    occurrences: list[tuple[int, CandidateQuestion]] = []
    matched_texts = set()
    for candidate in candidates:
        pos = response.find(candidate.text)
        if pos >= 0 and candidate.text not in matched_texts:
            occurrences.append((pos, candidate))
            matched_texts.add(candidate.text)
    occurrences.sort(key=lambda pair: pair[0])

    for line in response.splitlines():
        match = _NUMBERED_LINE_RE.match(line)
        if match:
            entry = match.group(1).strip()
            if entry and not any(c.text in entry or entry in c.text for c in candidates):
                logger.warning("dropping non-candidate ranking entry: %r", entry[:120])

    chosen = [candidate for _pos, candidate in occurrences[:k]]
    if not chosen:
        logger.warning("no candidate matched the ranking output; using generation order")
        chosen = candidates[:k]

    created_at = isoformat_utc(clock.now())
    return [
        ResearchQuestion(
            question_id=question_id_for(project_id, candidate.text),
            text=candidate.text,
            explanation=candidate.explanation,
            origin=QuestionOrigin.GENERATED,
            rank=i + 1,
            tracked=False,
            status=QuestionStatus.PENDING,
            created_at=created_at,
            source_revision_id=source_revision_id,
        )
        for i, candidate in enumerate(chosen)
    ]


class AnalysisStore:
    """Persistence for assessments (state.json) and questions (questions.json)."""

    def __init__(self, projects: ProjectStore, clock: Clock | None = None):
        self.projects = projects
        self.clock = clock or Clock()

    # -- assessments ---------------------------------------------------------

    def load_assessment(self, project_id: str) -> ProjectStateAssessment | None:
        data = read_json(self.projects.state_path(project_id))
        return ProjectStateAssessment.from_record(data) if data else None

    def save_assessment(self, project_id: str, assessment: ProjectStateAssessment) -> None:
        atomic_write_json(self.projects.state_path(project_id), assessment.to_record())

    def apply_state_override(self, project_id: str, state_label: str) -> ProjectStateAssessment:
        if not self.projects.exists(project_id):
            raise UnknownProjectError(f"no project {project_id!r}")
        if not state_label or not state_label.strip():
            raise ValidationFailure("state label must be non-empty")
        current = self.load_assessment(project_id)
        assessment = ProjectStateAssessment(
            state_label=state_label.strip(),
            rationale=current.rationale if current else "",
            assessed_at=isoformat_utc(self.clock.now()),
            source_revision_id=current.source_revision_id if current else None,
            user_overridden=True,
        )
        self.save_assessment(project_id, assessment)
        return assessment

    def clear_state_override(self, project_id: str) -> ProjectStateAssessment | None:
        current = self.load_assessment(project_id)
        if current is None:
            return None
        current.user_overridden = False
        self.save_assessment(project_id, current)
        return current

    # -- questions -------------------------------------------------------------

    def load_questions(self, project_id: str) -> list[ResearchQuestion]:
        records = read_json(self.projects.questions_path(project_id), default=[])
        return [ResearchQuestion.from_record(r) for r in records]

    def save_questions(self, project_id: str, questions: list[ResearchQuestion]) -> None:
        atomic_write_json(
            self.projects.questions_path(project_id),
            [q.to_record() for q in questions],
        )

    def get_question(self, project_id: str, question_id: str) -> ResearchQuestion:
        for question in self.load_questions(project_id):
            if question.question_id == question_id:
                return question
        raise UnknownQuestionError(f"no question {question_id!r}")

    def find_question(self, question_id: str) -> tuple[str, ResearchQuestion] | None:
        """Locate a question across all projects (question ids are global)."""
        for project in self.projects.list_projects():
            for question in self.load_questions(project.project_id):
                if question.question_id == question_id:
                    return project.project_id, question
        return None

    def upsert_questions(
        self, project_id: str, incoming: list[ResearchQuestion]
    ) -> list[ResearchQuestion]:
        """Merge by question_id, keeping tracked/status/origin of existing rows
        but refreshing rank and explanation from the new selection."""
        existing = {q.question_id: q for q in self.load_questions(project_id)}
        for question in incoming:
            prior = existing.get(question.question_id)
            if prior is None:
                existing[question.question_id] = question
            else:
                prior.rank = question.rank
                if question.explanation:
                    prior.explanation = question.explanation
                prior.source_revision_id = question.source_revision_id
        merged = list(existing.values())
        self.save_questions(project_id, merged)
        return merged

    def update_question(self, project_id: str, question: ResearchQuestion) -> None:
        questions = self.load_questions(project_id)
        for i, existing in enumerate(questions):
            if existing.question_id == question.question_id:
                questions[i] = question
                self.save_questions(project_id, questions)
                return
        raise UnknownQuestionError(f"no question {question.question_id!r}")

    def add_user_question(self, project_id: str, text: str) -> ResearchQuestion:
        if not self.projects.exists(project_id):
            raise UnknownProjectError(f"no project {project_id!r}")
        if not text or not text.strip():
            raise ValidationFailure("question text must be non-empty")
        text = text.strip()
        questions = self.load_questions(project_id)
        for existing in questions:
            if (
                existing.status != QuestionStatus.RETIRED
                and normalize_question(existing.text) == normalize_question(text)
            ):
                raise DuplicateQuestionError(f"question already exists: {text!r}")
        question = ResearchQuestion(
            question_id=question_id_for(project_id, text),
            text=text,
            explanation="",
            origin=QuestionOrigin.USER_ADDED,
            rank=None,
            tracked=False,
            status=QuestionStatus.PENDING,
            created_at=isoformat_utc(self.clock.now()),
            source_revision_id=None,
        )
        questions.append(question)
        self.save_questions(project_id, questions)
        return question
