"""Self-contained demo workspace with a full replay-fixture corpus.

Builds a workspace directory holding a research-project document, a
frozen-clock config, and recorded provider responses for every call the
pipeline makes, so `litscout run --project fixture` executes the whole
pipeline offline and deterministically. The same corpus backs the
integration and acceptance tests.

The fixtures are constructed with the production prompt/render/parse
code, which is what keeps the recorded request hashes aligned with the
hashes the pipeline computes at run time.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from litscout.analysis import (
    CandidateQuestion,
    ProjectStateAssessment,
    ResearchQuestion,
    QuestionOrigin,
    QuestionStatus,
    question_id_for,
    render_candidates,
)
from litscout.anchors import render_anchor_items
from litscout.clock import FixedClock, isoformat_utc
from litscout.config import load_config
from litscout.documents.sentences import SentenceEntry, render_numbered, segment_sentences
from litscout.documents.sources import SourceKind, SourceLocator
from litscout.papers import annotate_document
from litscout.projects import ProjectRecord, UpdateFrequency
from litscout.providers.base import CitationEntry, DeepResearchAnswer
from litscout.providers.mock import ReplayDeepResearch, ReplayLLM
from litscout.providers.prompts import TemplateId, build_request
from litscout.service import Services, build_services
from litscout.storage import atomic_write_json, atomic_write_text, dump_json
from litscout.suggestions.engine import render_citation_labels, render_recommendations
from litscout.suggestions.models import (
    PaperLabel,
    ParsedGeneration,
    ParsedSuggestion,
    Suggestion,
    content_hash_for,
    suggestion_id_for,
)
from litscout.suggestions.parser import render_generation_output

PROJECT_ID = "fixture"
PAST_PROJECT_ID = "fixture-past"
FROZEN_TIME = datetime(2026, 8, 10, 12, 0, 0, tzinfo=timezone.utc)
DOC_MTIME = datetime(2026, 8, 10, 9, 0, 0, tzinfo=timezone.utc)

STATE_LABEL = "Ideation and early experimental design"
STATE_RATIONALE = (
    "The document iterates on framing and study options, and the evaluation "
    "criteria section is announced but still empty, so the project is shaping "
    "its idea and sketching an experiment rather than collecting data."
)

PAST_STATE_LABEL = "Ideation"
PAST_STATE_RATIONALE = (
    "The document is a short idea sketch with open questions and no study "
    "plan, which places the project squarely in ideation."
)


# --------------------------------------------------------------------------
# Papers: 16 titled mentions plus one link-only mention.
# --------------------------------------------------------------------------

PAPERS = [
    ("p001", "Rubric-Guided Peer Assessment at Scale"),
    ("p002", "Calibrated Peer Review in CS1 Classrooms"),
    ("p003", "Automated Feedback Generation for Programming Assignments: A Survey"),
    ("p004", "Learning to Critique: Training Students as Code Reviewers"),
    ("p005", "ReviewBot: Static Analysis Meets Peer Feedback"),
    ("p006", "The Effect of Anonymity on Peer Review Quality"),
    ("p007", "Scaffolded Code Walkthroughs for Novice Programmers"),
    ("p008", "Comparing Expert and Peer Feedback in Large Online Courses"),
    ("p009", "Feedback Literacy in Undergraduate Software Courses"),
    ("p010", "Sentiment-Aware Comment Rewriting for Student Reviews"),
    ("p011", "Pair Programming versus Peer Review: A Controlled Study"),
    ("p012", "Prompting Large Language Models to Critique Code"),
    ("p013", "Checklists that Fade: Adaptive Scaffolds for Code Review"),
    ("p014", "Meta-Review in Education: Who Reviews the Reviewers?"),
    ("p015", "Dialogue-Based Tutoring Systems: Three Decades of Lessons"),
    ("p016", "Measuring Revision Uptake after Peer Feedback"),
    ("arxiv:2403.11111", "Adaptive Reviewer Assignment with Bandit Feedback"),
]

LINK_ONLY_URL = "https://arxiv.org/abs/2403.11111"
LINK_ONLY_LABEL = "bandit reviewer assignment preprint"

_RELATED_WORK_NOTES = {
    "p001": "argues that rubric anchors roughly double inter-rater agreement between student reviewers",
    "p002": "is our main precedent for calibration rounds before real reviews count",
    "p003": "maps the autograder landscape we want to complement, not compete with",
    "p004": "shows that short critique training sessions transfer to better review comments",
    "p005": "mixes static-analysis hints into the peer review queue, close to our hint idea",
    "p006": "finds anonymous reviewers write harsher but more substantive comments",
    "p007": "inspired the guided walkthrough mode in our early sketches",
    "p008": "reports peer feedback approaching expert quality when scaffolded",
    "p009": "frames how students develop the capacity to use feedback at all",
    "p010": "rewrites blunt review comments into encouraging ones without losing content",
    "p011": "contrasts synchronous pairing with asynchronous review, informing our async choice",
    "p012": "benchmarks LLM critique quality on student code, a possible baseline",
    "p013": "fades checklists as reviewers gain skill, which matches our scaffolding goal",
    "p014": "adds a meta-review layer that we might borrow for quality control",
    "p015": "is the long view on tutoring dialogue we keep citing for feedback timing",
    "p016": "operationalizes revision uptake, our leading candidate outcome measure",
}


def paper_title(key: str) -> str:
    for paper_id, title in PAPERS:
        if paper_id == key:
            return title
    raise KeyError(key)


def _related_work_bullets() -> list[str]:
    bullets = []
    for paper_id, title in PAPERS:
        if paper_id == "arxiv:2403.11111":
            bullets.append(
                f"- We also keep an eye on the [{LINK_ONLY_LABEL}]({LINK_ONLY_URL}) "
                "for adaptive reviewer-matching ideas."
            )
        else:
            bullets.append(f"- {title} {_RELATED_WORK_NOTES[paper_id]}.")
    return bullets


DOC_TEXT = "\n".join(
    [
        "# PeerCraft: AI-assisted peer code review for intro programming courses",
        "",
        "Project leads: T. Okafor, J. Lindqvist. Started 2026-05-04.",
        "",
        "## Project summary",
        "",
        "PeerCraft pairs students for asynchronous code review and uses an assistant "
        "to scaffold the reviewer rather than replace them.",
        "The assistant drafts review checklists from the assignment spec, nudges "
        "reviewers toward concrete and kind comments, and routes disputed feedback "
        "to the course staff.",
        "We iterated on the framing twice: first as an autograder extension, then "
        "as a reviewer-support tool, and the second framing stuck.",
        "The open question is whether scaffolded peer review improves both the "
        "feedback itself and what students do with it.",
        "",
        "## Research questions",
        "",
        "- RQ1: Does checklist scaffolding improve the specificity of novice review comments?",
        "- RQ2: Does assistant-mediated tone rewriting change how recipients act on feedback?",
        "- RQ3: Which reviewer-assignment policies keep review load fair across the class?",
        "",
        "## Related work so far",
        "",
        *_related_work_bullets(),
        "",
        "## Study design sketch (notes from 2026-07-28)",
        "",
        "We are leaning toward a within-subjects design across two assignments in "
        "the fall CS1 offering.",
        "Condition A gets plain peer review, condition B gets PeerCraft scaffolds.",
        "We still need to decide the primary outcome: comment specificity scores "
        "or revision uptake within one week.",
        "Recruitment depends on the department approving the classroom study by "
        "2026-08-20.",
        "",
        "## Evaluation criteria",
        "",
        "(to be filled in after the pilot)",
        "",
        "## Meeting notes",
        "",
        "### 2026-06-12",
        "",
        "Decided against building our own static analyzer; we will reuse course "
        "linters and focus the novelty on the review scaffolding loop.",
        "Concern raised that anonymity settings may interact with tone rewriting.",
        "",
        "### 2026-07-31",
        "",
        "Framing iteration two accepted by the group.",
        "Next step is to write the evaluation criteria section and pick the "
        "uptake measure before the August review.",
        "",
    ]
)

PAST_DOC_TEXT = "\n".join(
    [
        "# PeerCraft: early idea sketch",
        "",
        "Notes from 2026-05-04.",
        "",
        "## The itch",
        "",
        "Intro programming students get too little feedback on code style and "
        "design, and staff time does not scale.",
        "Maybe peer review can carry more weight if an assistant scaffolds the "
        "reviewers.",
        "Could be an autograder extension, could be a standalone tool; unclear.",
        "",
        "## Things to read",
        "",
        "- Rubric-Guided Peer Assessment at Scale looks central for rubric design.",
        "- Calibrated Peer Review in CS1 Classrooms for calibration rounds.",
        "- Automated Feedback Generation for Programming Assignments: A Survey to map the space.",
        "- Learning to Critique: Training Students as Code Reviewers on critique training.",
        "- The Effect of Anonymity on Peer Review Quality before choosing anonymity settings.",
        "- Comparing Expert and Peer Feedback in Large Online Courses for the quality ceiling.",
        "- Prompting Large Language Models to Critique Code as a possible baseline.",
        "- Dialogue-Based Tutoring Systems: Three Decades of Lessons for timing lessons.",
        "- Measuring Revision Uptake after Peer Feedback for outcome ideas.",
        "- Pair Programming versus Peer Review: A Controlled Study for the sync/async question.",
        "",
        "## Open questions",
        "",
        "Is reviewer scaffolding novel enough, and what would a pilot even measure?",
        "",
    ]
)

PAST_PAPER_IDS = [
    "p001",
    "p002",
    "p003",
    "p004",
    "p006",
    "p008",
    "p012",
    "p015",
    "p016",
    "p011",
]


# --------------------------------------------------------------------------
# Candidate questions. The first twelve of CANDIDATES are selected, in the
# order given by SELECTED_ORDER (indexes into CANDIDATES).
# --------------------------------------------------------------------------

CANDIDATES = [
    CandidateQuestion(
        "What rubric designs improve the specificity of peer code review comments from novice programmers?",
        "RQ1 hinges on comment specificity, and the related work bullet on rubric anchors suggests rubric design is the lever.",
    ),
    CandidateQuestion(
        "How have classroom studies measured whether students revise their code after receiving peer feedback?",
        "The study design sketch is undecided between specificity scores and revision uptake as the primary outcome.",
    ),
    CandidateQuestion(
        "What reviewer assignment policies are used in peer code review systems to balance load and expertise?",
        "RQ3 asks about fair reviewer assignment, and the linked preprint on bandit assignment is the only current lead.",
    ),
    CandidateQuestion(
        "How does reviewer anonymity affect the tone and substance of peer feedback in programming courses?",
        "The 2026-06-12 meeting note flags an interaction between anonymity settings and tone rewriting.",
    ),
    CandidateQuestion(
        "What calibration procedures prepare students to give reliable peer assessments before their reviews count?",
        "Calibration rounds are cited as the main precedent, so evidence on their design would firm up the protocol.",
    ),
    CandidateQuestion(
        "Which outcome measures beyond grades capture feedback quality in peer code review studies?",
        "The evaluation criteria section is still empty, and the group must pick measures before the August review.",
    ),
    CandidateQuestion(
        "How effective are automatically generated checklists at guiding novice reviewers through code review?",
        "Checklist scaffolding is the core of RQ1 and the fading-checklists work suggests adaptivity matters.",
    ),
    CandidateQuestion(
        "What does prior work report about rewriting the tone of peer feedback without losing its content?",
        "RQ2 depends on tone rewriting preserving substance, as the sentiment-aware rewriting bullet describes.",
    ),
    CandidateQuestion(
        "How close does scaffolded peer feedback come to expert feedback quality in large programming courses?",
        "The expert-versus-peer comparison bullet sets the quality ceiling the project hopes to approach.",
    ),
    CandidateQuestion(
        "What within-subjects designs have been used to evaluate peer review interventions across assignments?",
        "The study design sketch leans within-subjects across two assignments, so design precedents reduce risk.",
    ),
    CandidateQuestion(
        "How do large language models perform when asked to critique student code, and what are their failure modes?",
        "The LLM critique benchmark bullet is a candidate baseline for the assistant's draft comments.",
    ),
    CandidateQuestion(
        "What evidence exists on training students to be better code reviewers through short interventions?",
        "Critique training transfer is cited in related work and would shape the onboarding week.",
    ),
    CandidateQuestion(
        "How should disputes between reviewers and authors be escalated in classroom peer review tools?",
        "The summary says disputed feedback routes to course staff, but no policy is sketched anywhere.",
    ),
    CandidateQuestion(
        "What privacy concerns arise when an assistant reads student code and review comments?",
        "A classroom deployment needs the department approval noted in the study design sketch.",
    ),
    CandidateQuestion(
        "How have static analysis hints been combined with human review queues in education?",
        "The ReviewBot bullet overlaps with the hint idea that survived the framing iterations.",
    ),
    CandidateQuestion(
        "What sample sizes do classroom peer review studies use to detect feedback-quality effects?",
        "Power planning is absent from the study design sketch and will be asked at the August review.",
    ),
    CandidateQuestion(
        "How does feedback literacy develop in undergraduate software courses and can tools accelerate it?",
        "Feedback literacy framing appears in related work and could strengthen the theoretical grounding.",
    ),
    CandidateQuestion(
        "What incentive structures keep peer reviewers engaged across a full course term?",
        "Load fairness in RQ3 implies engagement matters over the whole term, not one assignment.",
    ),
    CandidateQuestion(
        "Which metrics quantify the kindness or constructiveness of written feedback?",
        "Tone rewriting in RQ2 needs a measurable notion of kind and concrete comments.",
    ),
    CandidateQuestion(
        "How do meta-review or review-the-reviewer layers affect feedback quality in courses?",
        "The meta-review bullet suggests a quality-control layer worth evaluating for the tool.",
    ),
]

SELECTED_ORDER = [2, 0, 6, 1, 10, 4, 8, 3, 11, 7, 9, 5]

PAST_CANDIDATES = [
    CANDIDATES[0],
    CANDIDATES[4],
    CANDIDATES[8],
    CANDIDATES[10],
    CandidateQuestion(
        "Is assistant-scaffolded peer code review a novel contribution compared to existing peer assessment tools?",
        "The open questions section asks directly whether the scaffolding idea is novel enough.",
    ),
    CandidateQuestion(
        "What lightweight pilot designs can test a peer review support tool within a single course unit?",
        "The sketch has no study plan yet, and the open questions ask what a pilot would even measure.",
    ),
    CandidateQuestion(
        "What are realistic use cases for AI assistants inside classroom peer assessment workflows?",
        "The itch section frames the assistant broadly; concrete use cases would focus the idea.",
    ),
    CandidateQuestion(
        "How have autograder extensions historically incorporated qualitative feedback for students?",
        "The sketch is undecided between an autograder extension and a standalone tool.",
    ),
    CandidateQuestion(
        "What feasibility barriers do researchers report when deploying review tools in intro courses?",
        "Staff time not scaling is the motivating pain, so known deployment barriers matter early.",
    ),
    CandidateQuestion(
        "Which domains outside programming education use scaffolded peer feedback successfully?",
        "Cross-domain inspiration fits the ideation stage described by the document.",
    ),
    CandidateQuestion(
        "What makes peer feedback actionable for novices according to learning sciences literature?",
        "The itch section worries students get too little usable feedback; actionability research grounds that.",
    ),
    CandidateQuestion(
        "How much staff effort do peer review orchestration tools actually save in practice?",
        "Staff time is the core constraint named in the sketch, so measured savings would justify the idea.",
    ),
    CandidateQuestion(
        "What failure stories exist for classroom peer review deployments and why did they fail?",
        "Knowing failure modes during ideation prevents repeating them in the eventual design.",
    ),
    CandidateQuestion(
        "Which platforms support anonymous asynchronous code review for education today?",
        "Platform landscape shapes whether to build standalone or extend existing tools.",
    ),
    CandidateQuestion(
        "What theories of feedback uptake could frame a peer review support tool's contribution?",
        "A framing theory would answer the novelty worry in the open questions section.",
    ),
    CandidateQuestion(
        "How do students perceive AI involvement in grading and feedback processes?",
        "Perception risks matter before committing to an assistant-centered design.",
    ),
]

PAST_SELECTED_ORDER = [4, 0, 6, 5, 8, 10, 2, 3, 11, 9, 13, 12]


# --------------------------------------------------------------------------
# Per-question deep-research answers and suggestion seeds.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SuggestionSeed:
    title: str
    text: str
    labels: tuple[str, ...]
    info: str
    anchor_marker: str | None  # substring of the doc sentence to anchor to


@dataclass(frozen=True)
class QuestionSeed:
    label_papers: tuple[str, ...]  # paper keys for labels "1", "2", ...
    finding_a: str
    finding_b: str
    suggestions: tuple[SuggestionSeed, SuggestionSeed]


def _seed_for(selected_rank: int, candidate_index: int) -> QuestionSeed:
    """Deterministic content seeds, varied per question."""
    base = candidate_index % len(PAPERS)
    keys = (
        PAPERS[base][0],
        PAPERS[(base + 3) % len(PAPERS)][0],
        PAPERS[(base + 7) % len(PAPERS)][0],
    )
    question = CANDIDATES[candidate_index].text
    topic = question.rstrip("?").lower()
    finding_a = (
        f"Recent classroom studies converge on measurable gains when {topic} "
        f"is treated as a design variable rather than an afterthought [1]. "
        f"Replication across institutions remains thin, with most evidence "
        f"coming from single-course deployments [1, 2]."
    )
    finding_b = (
        f"A second thread connects this to instrumentation: papers that report "
        f"effects also ship reusable measures, and reviewers lean on those "
        f"measures when designing follow-ups [2]. One line of work cautions "
        f"that effects shrink once novelty wears off [3]."
    )
    first = SuggestionSeed(
        title=f"Ground measure choice for question {candidate_index + 1}",
        text=(
            f"Since the study design sketch still weighs specificity scores "
            f"against revision uptake, the instrumentation used in "
            f"{paper_title(keys[1])} [2] could settle the primary outcome for: "
            f"{topic}."
        ),
        labels=("2",),
        info=(
            f"{paper_title(keys[1])} reports instrument reliability above 0.8 "
            f"across two course offerings."
        ),
        anchor_marker="We still need to decide the primary outcome",
    )
    second = SuggestionSeed(
        title=f"Stress-test plan against finding {candidate_index + 1}",
        text=(
            f"The caution in {paper_title(keys[2])} [3] that effects fade after "
            f"novelty suggests adding a late-term checkpoint to the "
            f"within-subjects plan related to {topic}."
        ),
        labels=("3", "1"),
        info=(
            f"{paper_title(keys[2])} observed effect sizes dropping by half "
            f"between week 4 and week 10; {paper_title(keys[0])} provides the "
            f"baseline design."
        ),
        anchor_marker=(
            "## Evaluation criteria"
            if selected_rank == 2
            else "leaning toward a within-subjects design"
        ),
    )
    return QuestionSeed(
        label_papers=keys,
        finding_a=finding_a,
        finding_b=finding_b,
        suggestions=(first, second),
    )


def selected_candidates() -> list[CandidateQuestion]:
    return [CANDIDATES[i] for i in SELECTED_ORDER]


def past_selected_candidates() -> list[CandidateQuestion]:
    return [PAST_CANDIDATES[i] for i in PAST_SELECTED_ORDER]


def answer_record_for(candidate_index: int, rank: int, injected: bool = False) -> dict:
    seed = _seed_for(rank, candidate_index)
    labels = {
        str(i + 1): {
            "title": paper_title(key),
            "paper_id": key,
            "url": LINK_ONLY_URL if key.startswith("arxiv") else None,
        }
        for i, key in enumerate(seed.label_papers)
    }
    text = seed.finding_a + "\n\n" + seed.finding_b
    if injected:
        text += (
            "\n\nSince the previous answer, a controlled multi-site replication "
            "appeared and reports that adaptive reviewer assignment holds up "
            "outside single-course settings [3]."
        )
    return {"answer_text": text, "citation_labels": labels}


def generation_output_for(candidate_index: int, rank: int) -> str:
    seed = _seed_for(rank, candidate_index)
    summary = (
        f"The report consolidates evidence around "
        f"{CANDIDATES[candidate_index].text.rstrip('?').lower()}. "
        f"{seed.finding_a}\n\n{seed.finding_b}"
    )
    parsed = ParsedGeneration(
        summary=summary,
        suggestions=[
            ParsedSuggestion(
                title=s.title,
                text=s.text,
                papers=[PaperLabel(label=l, to_lookup=(l == "3")) for l in s.labels],
                info=s.info,
            )
            for s in seed.suggestions
        ],
    )
    return "<scratchpad>\nweighing findings against the project phase\n</scratchpad>\n" + render_generation_output(parsed)


DIFF_SUGGESTION = {
    "title": "Multi-site replication of adaptive reviewer assignment",
    "text": (
        "A new multi-site replication backs adaptive reviewer assignment beyond "
        "single-course pilots, which strengthens the case for the bandit-style "
        "matching policy sketched under RQ3."
    ),
    "info": (
        "The replication covered four institutions and held assignment fairness "
        "steady while improving review usefulness ratings."
    ),
}

DIFF_ANCHOR_MARKER = "RQ3: Which reviewer-assignment policies"


# --------------------------------------------------------------------------
# Builders.
# --------------------------------------------------------------------------


def _write_config(root: Path) -> Path:
    config_path = root / "config.yaml"
    atomic_write_text(
        config_path,
        "\n".join(
            [
                f"data_dir: {root / 'data'}",
                f"fixtures_dir: {root / 'fixtures'}",
                f"frozen_time: '{isoformat_utc(FROZEN_TIME)}'",
                "question_count: 12",
                "suggestion_count: 12",
                "default_frequency: weekly",
                "llm: {mode: replay}",
                "deep_research: {mode: replay}",
                "metadata: {mode: replay}",
                "notification: {sink: file}",
                "",
            ]
        ),
    )
    return config_path


def _write_metadata_table(root: Path) -> None:
    table = {}
    for paper_id, title in PAPERS:
        table[paper_id] = {
            "title": title,
            "url": LINK_ONLY_URL if paper_id.startswith("arxiv") else None,
            "abstract": f"Abstract of {title}: method, study context, and findings.",
        }
    atomic_write_json(root / "fixtures" / "metadata.json", table)


def _mentions_for(doc_text: str, paper_ids: list[str]) -> list[dict]:
    mentions = []
    for paper_id in paper_ids:
        title = paper_title(paper_id)
        if paper_id.startswith("arxiv") and LINK_ONLY_URL in doc_text:
            context_line = next(
                line for line in doc_text.splitlines() if LINK_ONLY_URL in line
            )
            mentions.append(
                {
                    "title": None,
                    "url": LINK_ONLY_URL,
                    "context": context_line.lstrip("- ").strip(),
                    "link_label": LINK_ONLY_LABEL,
                    "project_relation": "Candidate policy source for reviewer assignment.",
                }
            )
            continue
        context_line = next(
            (line for line in doc_text.splitlines() if title in line), None
        )
        if context_line is None:
            continue
        mentions.append(
            {
                "title": title,
                "url": None,
                "context": context_line.lstrip("- ").strip(),
                "link_label": None,
                "project_relation": None,
            }
        )
    return mentions


def _analysis_json(state: str, why: str, candidates: list[CandidateQuestion]) -> str:
    return dump_json(
        {
            "project_state": state,
            "why_project_state": why,
            "questions": [
                {"question": c.text, "explanation": c.explanation} for c in candidates
            ],
        }
    )


def _selection_response(chosen: list[CandidateQuestion]) -> str:
    lines = ["Final ranking of the most useful and diverse questions:", ""]
    for i, candidate in enumerate(chosen):
        lines.append(f"{i + 1}. {candidate.text}")
        lines.append(f"   Placed at {i + 1} for its direct impact on the current stage.")
        lines.append("")
    return "\n".join(lines)


def _ranking_response(ordered: list[Suggestion]) -> str:
    lines = ["**Ranking:**", ""]
    for i, suggestion in enumerate(ordered):
        lines.append(f"**{i + 1}.**")
        lines.append(
            "Reasoning: directly actionable at this stage and distinct from "
            "higher-ranked picks."
        )
        lines.append(f"Recommendation: {suggestion.text}")
        lines.append("")
    return "\n".join(lines)


def _find_sentence(sentences: list[SentenceEntry], marker: str) -> SentenceEntry:
    for sentence in sentences:
        if marker in sentence.content:
            return sentence
    raise AssertionError(f"demo doc is missing anchor marker {marker!r}")


def _anchor_response(
    batch: list[Suggestion],
    markers: dict[str, str | None],
    sentences: list[SentenceEntry],
) -> str:
    payload = {}
    for suggestion in batch:
        marker = markers.get(suggestion.suggestion_id)
        if marker is None:
            payload[suggestion.suggestion_id] = {"matches": []}
            continue
        sentence = _find_sentence(sentences, marker)
        payload[suggestion.suggestion_id] = {
            "matches": [
                {
                    "sentence_index": sentence.index,
                    "quote": sentence.content,
                    "reasoning": "The suggestion acts on exactly what this sentence leaves open.",
                    "location": "Study design sketch"
                    if "design" in sentence.content
                    else "Document body",
                }
            ]
        }
    return dump_json(payload)


@dataclass
class DemoCorpus:
    """Everything the builder derived while writing fixtures."""

    annotated_doc: str
    sentences: list[SentenceEntry]
    assessment: ProjectStateAssessment
    selected: list[ResearchQuestion]
    pooled: list[Suggestion]
    ranked: list[Suggestion]
    anchor_markers: dict[str, str | None]


def _pooled_suggestions(selected: list[ResearchQuestion]) -> tuple[list[Suggestion], dict[str, str | None]]:
    pooled: list[Suggestion] = []
    markers: dict[str, str | None] = {}
    for rank_pos, question in enumerate(selected, start=1):
        candidate_index = SELECTED_ORDER[rank_pos - 1]
        seed = _seed_for(rank_pos, candidate_index)
        for suggestion_seed in seed.suggestions:
            parsed = ParsedSuggestion(
                title=suggestion_seed.title,
                text=suggestion_seed.text,
                papers=[
                    PaperLabel(label=l, to_lookup=(l == "3"))
                    for l in suggestion_seed.labels
                ],
                info=suggestion_seed.info,
            )
            suggestion = Suggestion.from_parsed(question.question_id, parsed)
            markers[suggestion.suggestion_id] = suggestion_seed.anchor_marker
            pooled.append(suggestion)
    return pooled, markers


def _rank_order(pooled: list[Suggestion]) -> list[Suggestion]:
    """Delivery permutation: the two suggestions of the rank-1 question are
    pushed to the bottom so a later tracked-question run can dedup cleanly."""
    head = pooled[2:]
    tail = pooled[:2]
    interleaved = head[1::2] + head[0::2]
    return interleaved + tail


def build_demo_workspace(root: Path | str) -> Path:
    """Create doc, config, data tree, and the full fixture corpus."""
    root = Path(root).absolute()
    root.mkdir(parents=True, exist_ok=True)
    doc_path = root / "doc.md"
    atomic_write_text(doc_path, DOC_TEXT)
    os.utime(doc_path, (DOC_MTIME.timestamp(), DOC_MTIME.timestamp()))

    config_path = _write_config(root)
    _write_metadata_table(root)

    llm = ReplayLLM(root / "fixtures")
    deep = ReplayDeepResearch(root / "fixtures")

    # Mention extraction + relation transcripts for the current document.
    llm.record(
        build_request(TemplateId.PAPER_EXTRACTION, {"doc": DOC_TEXT}),
        dump_json(_mentions_for(DOC_TEXT, [p for p, _ in PAPERS])),
    )
    _record_relation_transcripts(llm, DOC_TEXT, [p for p, _ in PAPERS])

    # Seed the project, then refresh the catalog with production code so the
    # annotated document matches what the pipeline will compute.
    services = build_services(load_config(config_path), clock=FixedClock(FROZEN_TIME))
    if not services.projects.exists(PROJECT_ID):
        services.projects.create_project(
            ProjectRecord(
                project_id=PROJECT_ID,
                name="PeerCraft",
                frequency=UpdateFrequency.WEEKLY,
                created_at=isoformat_utc(FROZEN_TIME),
            )
        )
        services.documents.register_source(
            PROJECT_ID,
            SourceLocator(
                source_id="",
                kind=SourceKind.LOCAL_FILE,
                address=str(doc_path),
                display_name="project doc",
            ),
        )
    corpus = _build_pipeline_fixtures(services, llm, deep)
    _write_manifest(root, corpus)
    return root


def _record_relation_transcripts(llm: ReplayLLM, doc_text: str, paper_ids: list[str]) -> None:
    for mention in _mentions_for(doc_text, paper_ids):
        title = mention["title"] or paper_title("arxiv:2403.11111")
        paper_id = next(p for p, t in PAPERS if t == title)
        llm.record(
            build_request(
                TemplateId.PAPER_RELATION,
                {
                    "document_excerpt": mention["context"],
                    "paper_title": title,
                    "paper_abstract": f"Abstract of {title}: method, study context, and findings.",
                    "project_relation": mention["project_relation"] or "null",
                },
            ),
            f"{title} informs the project by {_RELATED_WORK_NOTES.get(paper_id, 'offering the reviewer-assignment policy under consideration')}.",
        )


def _build_pipeline_fixtures(
    services: Services, llm: ReplayLLM, deep: ReplayDeepResearch
) -> DemoCorpus:
    catalog = services.catalog.refresh(PROJECT_ID, DOC_TEXT)
    annotated = annotate_document(DOC_TEXT, catalog)
    sentences = segment_sentences(DOC_TEXT)
    today = FixedClock(FROZEN_TIME).today_str()

    # Analysis + selection transcripts.
    llm.record(
        build_request(TemplateId.DOCUMENT_ANALYSIS, {"today": today, "doc": annotated}),
        _analysis_json(STATE_LABEL, STATE_RATIONALE, CANDIDATES),
    )
    chosen = selected_candidates()
    llm.record(
        build_request(
            TemplateId.QUESTION_RANKING,
            {
                "doc": annotated,
                "project_state": STATE_LABEL,
                "why_project_state": STATE_RATIONALE,
                "questions": render_candidates(CANDIDATES),
            },
        ),
        _selection_response(chosen),
    )

    assessment = ProjectStateAssessment(
        state_label=STATE_LABEL,
        rationale=STATE_RATIONALE,
        assessed_at=isoformat_utc(FROZEN_TIME),
        source_revision_id=1,
        user_overridden=False,
    )
    selected = [
        ResearchQuestion(
            question_id=question_id_for(PROJECT_ID, c.text),
            text=c.text,
            explanation=c.explanation,
            origin=QuestionOrigin.GENERATED,
            rank=i + 1,
            tracked=False,
            status=QuestionStatus.PENDING,
            created_at=isoformat_utc(FROZEN_TIME),
            source_revision_id=1,
        )
        for i, c in enumerate(chosen)
    ]

    # Deep-research answers + generation transcripts per selected question.
    for rank_pos, question in enumerate(selected, start=1):
        candidate_index = SELECTED_ORDER[rank_pos - 1]
        record = answer_record_for(candidate_index, rank_pos)
        deep.record(question.text, record)
        answer = DeepResearchAnswer(
            question_id=question.question_id,
            answer_text=record["answer_text"],
            citation_labels={
                label: CitationEntry.from_record(entry)
                for label, entry in record["citation_labels"].items()
            },
            retrieved_at=FROZEN_TIME,
        )
        llm.record(
            build_request(
                TemplateId.SUGGESTION_GENERATION,
                {
                    "question": question.text,
                    "question_explanation": question.explanation,
                    "answer": answer.answer_text,
                    "citation_labels": render_citation_labels(answer),
                    "doc": annotated,
                    "project_state": STATE_LABEL,
                    "why_project_state": STATE_RATIONALE,
                },
            ),
            generation_output_for(candidate_index, rank_pos),
        )

    pooled, markers = _pooled_suggestions(selected)
    ranked_full = _rank_order(pooled)
    llm.record(
        build_request(
            TemplateId.SUGGESTION_RANKING,
            {
                "doc": annotated,
                "project_state": STATE_LABEL,
                "recommendations": render_recommendations(pooled),
            },
        ),
        _ranking_response(ranked_full),
    )
    ranked = ranked_full[:12]

    explanations = {}
    by_id = {q.question_id: q for q in selected}
    for suggestion in ranked:
        question = by_id[suggestion.question_id]
        explanations[suggestion.suggestion_id] = question.explanation
    llm.record(
        build_request(
            TemplateId.DOCUMENT_ANCHOR,
            {
                "today": today,
                "document_sentences": render_numbered(sentences),
                "items": render_anchor_items(ranked, explanations),
            },
        ),
        _anchor_response(ranked, markers, sentences),
    )
    return DemoCorpus(
        annotated_doc=annotated,
        sentences=sentences,
        assessment=assessment,
        selected=selected,
        pooled=pooled,
        ranked=ranked,
        anchor_markers=markers,
    )


def _write_manifest(root: Path, corpus: DemoCorpus) -> None:
    atomic_write_json(
        root / "manifest.json",
        {
            "project_id": PROJECT_ID,
            "selected_question_ids": [q.question_id for q in corpus.selected],
            "selected_question_texts": [q.text for q in corpus.selected],
            "delivered_suggestion_ids": [s.suggestion_id for s in corpus.ranked],
            "delivered_titles": [s.title for s in corpus.ranked],
            "tracked_candidate": corpus.selected[0].question_id,
        },
    )


def install_tracking_fixtures(root: Path | str, injected: bool) -> None:
    """Fixtures for a second run where the rank-1 question is tracked.

    ``injected`` swaps the tracked question's recorded answer for one with
    an added finding, so the diff comes back meaningful; otherwise the
    answers are identical and the diff must say so.
    """
    root = Path(root).absolute()
    llm = ReplayLLM(root / "fixtures")
    deep = ReplayDeepResearch(root / "fixtures")
    services = build_services(load_config(root / "config.yaml"), clock=FixedClock(FROZEN_TIME))

    catalog = services.catalog.load(PROJECT_ID)
    annotated = annotate_document(DOC_TEXT, catalog)
    sentences = segment_sentences(DOC_TEXT)
    today = FixedClock(FROZEN_TIME).today_str()

    chosen = selected_candidates()
    tracked_candidate_index = SELECTED_ORDER[0]
    tracked_text = chosen[0].text

    original = answer_record_for(tracked_candidate_index, 1)
    new_record = (
        answer_record_for(tracked_candidate_index, 1, injected=True)
        if injected
        else original
    )
    if injected:
        deep.record(tracked_text, new_record)

    diff_payload = (
        {"has_meaningful_diff": True, "suggestions": [DIFF_SUGGESTION]}
        if injected
        else {"has_meaningful_diff": False, "suggestions": []}
    )
    llm.record(
        build_request(
            TemplateId.ANSWER_DIFF,
            {
                "question": tracked_text,
                "project_state": STATE_LABEL,
                "old_answer": original["answer_text"],
                "new_answer": new_record["answer_text"],
            },
        ),
        dump_json(diff_payload),
    )

    # Second-run ranking covers the pool without the tracked question.
    selected = [
        ResearchQuestion(
            question_id=question_id_for(PROJECT_ID, c.text),
            text=c.text,
            explanation=c.explanation,
            origin=QuestionOrigin.GENERATED,
            rank=i + 1,
            tracked=False,
            status=QuestionStatus.PENDING,
            created_at=isoformat_utc(FROZEN_TIME),
            source_revision_id=1,
        )
        for i, c in enumerate(chosen)
    ]
    pooled_all, _markers = _pooled_suggestions(selected)
    remaining_pool = [
        s for s in pooled_all if s.question_id != selected[0].question_id
    ]
    ranked_full = _rank_order(pooled_all)
    delivered_first_run = ranked_full[:12]
    second_rank_order = [s for s in delivered_first_run if s in remaining_pool] + [
        s for s in remaining_pool if s not in delivered_first_run
    ]
    llm.record(
        build_request(
            TemplateId.SUGGESTION_RANKING,
            {
                "doc": annotated,
                "project_state": STATE_LABEL,
                "recommendations": render_recommendations(remaining_pool),
            },
        ),
        _ranking_response(second_rank_order),
    )

    if injected:
        digest = content_hash_for(DIFF_SUGGESTION["title"], DIFF_SUGGESTION["text"])
        diff_suggestion = Suggestion(
            suggestion_id=suggestion_id_for(selected[0].question_id, digest),
            question_id=selected[0].question_id,
            title=DIFF_SUGGESTION["title"],
            text=DIFF_SUGGESTION["text"],
            papers=[],
            info=DIFF_SUGGESTION["info"],
            content_hash=digest,
            source="answer_diff",
        )
        llm.record(
            build_request(
                TemplateId.DOCUMENT_ANCHOR,
                {
                    "today": today,
                    "document_sentences": render_numbered(sentences),
                    "items": render_anchor_items([diff_suggestion], {}),
                },
            ),
            _anchor_response(
                [diff_suggestion],
                {diff_suggestion.suggestion_id: DIFF_ANCHOR_MARKER},
                sentences,
            ),
        )


def install_past_version_fixtures(root: Path | str) -> str:
    """Past-revision twin project: same pipeline, earlier document.

    Returns the past project's id. Fixtures cover extraction, relations,
    analysis, and selection — enough to compare selected question sets
    across document versions.
    """
    root = Path(root).absolute()
    doc_path = root / "doc_past.md"
    atomic_write_text(doc_path, PAST_DOC_TEXT)
    os.utime(doc_path, (DOC_MTIME.timestamp(), DOC_MTIME.timestamp()))

    llm = ReplayLLM(root / "fixtures")
    llm.record(
        build_request(TemplateId.PAPER_EXTRACTION, {"doc": PAST_DOC_TEXT}),
        dump_json(_mentions_for(PAST_DOC_TEXT, PAST_PAPER_IDS)),
    )
    _record_relation_transcripts(llm, PAST_DOC_TEXT, PAST_PAPER_IDS)

    services = build_services(
        load_config(root / "config.yaml"), clock=FixedClock(FROZEN_TIME)
    )
    if not services.projects.exists(PAST_PROJECT_ID):
        services.projects.create_project(
            ProjectRecord(
                project_id=PAST_PROJECT_ID,
                name="PeerCraft (past snapshot)",
                frequency=UpdateFrequency.NEVER,
                created_at=isoformat_utc(FROZEN_TIME),
            )
        )
        services.documents.register_source(
            PAST_PROJECT_ID,
            SourceLocator(
                source_id="",
                kind=SourceKind.LOCAL_FILE,
                address=str(doc_path),
                display_name="past project doc",
            ),
        )

    catalog = services.catalog.refresh(PAST_PROJECT_ID, PAST_DOC_TEXT)
    annotated_past = annotate_document(PAST_DOC_TEXT, catalog)
    today = FixedClock(FROZEN_TIME).today_str()
    llm.record(
        build_request(
            TemplateId.DOCUMENT_ANALYSIS, {"today": today, "doc": annotated_past}
        ),
        _analysis_json(PAST_STATE_LABEL, PAST_STATE_RATIONALE, PAST_CANDIDATES),
    )
    llm.record(
        build_request(
            TemplateId.QUESTION_RANKING,
            {
                "doc": annotated_past,
                "project_state": PAST_STATE_LABEL,
                "why_project_state": PAST_STATE_RATIONALE,
                "questions": render_candidates(PAST_CANDIDATES),
            },
        ),
        _selection_response(past_selected_candidates()),
    )
    return PAST_PROJECT_ID
