"""Paper catalog: mention extraction, resolution, tagging, relations.

Mentions come out of the extraction prompt, get resolved against the
scholarly-metadata provider (exact id or exact normalized-title match
only), and resolved papers are tagged into the document text so every
downstream prompt sees the catalog. Papers removed by the user stay in
the catalog for audit but never reach a prompt again.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from litscout.errors import TransientProviderError, UnknownPaperError, ValidationFailure
from litscout.jsontools import extract_json_array
from litscout.projects import ProjectStore
from litscout.providers.base import PaperMetadata
from litscout.providers.gateway import ResearchGateway, paper_id_from_url
from litscout.providers.mock import normalize_title
from litscout.providers.prompts import TemplateId, build_request
from litscout.storage import atomic_write_json, read_json

logger = logging.getLogger(__name__)

MENTION_URL_DOMAINS = (
    "semanticscholar.org",
    "arxiv.org",
    "aclweb.org",
    "aclanthology.org",
    "acm.org",
    "biorxiv.org",
)


@dataclass
class PaperMention:
    title: str | None = None
    url: str | None = None
    context: str = ""
    link_label: str | None = None
    project_relation: str | None = None


@dataclass
class PaperRef:
    paper_id: str
    title: str
    url: str | None = None
    mention_contexts: list[str] = field(default_factory=list)
    project_relation: str | None = None
    relation_user_edited: bool = False
    removed_by_user: bool = False

    def to_record(self) -> dict:
        return {
            "paper_id": self.paper_id,
            "title": self.title,
            "url": self.url,
            "mention_contexts": self.mention_contexts,
            "project_relation": self.project_relation,
            "relation_user_edited": self.relation_user_edited,
            "removed_by_user": self.removed_by_user,
        }

    @classmethod
    def from_record(cls, record: dict) -> "PaperRef":
        return cls(
            paper_id=record["paper_id"],
            title=record["title"],
            url=record.get("url"),
            mention_contexts=record.get("mention_contexts", []),
            project_relation=record.get("project_relation"),
            relation_user_edited=record.get("relation_user_edited", False),
            removed_by_user=record.get("removed_by_user", False),
        )


def extract_mentions(document_text: str, gateway: ResearchGateway) -> list[PaperMention]:
    """Ask the model for every paper mentioned in the document.

    Each mention needs a title or a url; url-only mentions must point at
    one of the recognized scholarly domains or they are dropped.
    """
    if not document_text.strip():
        return []
    request = build_request(TemplateId.PAPER_EXTRACTION, {"doc": document_text})
    raw = gateway.complete(request)
    try:
        items = extract_json_array(raw)
    except Exception:
        logger.warning("paper extraction output unparseable; retrying once")
        items = extract_json_array(gateway.complete(request))

    mentions = []
    for item in items:
        if not isinstance(item, dict):
            continue
        mention = PaperMention(
            title=item.get("title") or None,
            url=item.get("url") or None,
            context=item.get("context") or "",
            link_label=item.get("link_label") or item.get("text") or None,
            project_relation=item.get("project_relation") or None,
        )
        if not mention.title and not mention.url:
            logger.warning("dropping mention with neither title nor url: %r", item)
            continue
        if not mention.title and mention.url:
            if not any(domain in mention.url for domain in MENTION_URL_DOMAINS):
                logger.warning("dropping link-only mention outside known domains: %s", mention.url)
                continue
        mentions.append(mention)
    return mentions


def resolve_mention(mention: PaperMention, gateway: ResearchGateway) -> PaperRef | None:
    """Resolve a mention to canonical metadata, or None when nothing matches.

    An id extracted from the url wins; otherwise the title must match the
    provider's canonical title exactly after normalization. No fuzzy
    acceptance: a false resolution poisons every downstream suggestion.
    """
    metadata: PaperMetadata | None = None
    if mention.url:
        paper_id = paper_id_from_url(mention.url)
        if paper_id:
            metadata = gateway.lookup_paper(paper_id)
    if metadata is None and mention.title:
        candidate = gateway.lookup_paper(mention.title)
        if candidate and normalize_title(candidate.title) == normalize_title(mention.title):
            metadata = candidate
    if metadata is None:
        logger.info(
            "unresolved mention (title=%r url=%r context=%r)",
            mention.title,
            mention.url,
            mention.context[:120],
        )
        return None
    return PaperRef(
        paper_id=metadata.paper_id,
        title=metadata.title,
        url=metadata.url or mention.url,
        mention_contexts=[mention.context] if mention.context else [],
        project_relation=mention.project_relation,
    )


def paper_tag(paper: PaperRef) -> str:
    title = paper.title.replace('"', "'")
    return f'<Paper id="{paper.paper_id}" title="{title}"/>'


def annotate_document(text: str, catalog: list[PaperRef]) -> str:
    """Insert a paper tag after each mention site.

    Idempotent: a site already followed by the tag is left alone. Removed
    papers are never tagged, which is what keeps them out of every prompt
    payload built from the annotated text.
    """
    annotated = text
    for paper in catalog:
        if paper.removed_by_user:
            continue
        tag = paper_tag(paper)
        sites = paper.mention_contexts or ([paper.title] if paper.title else [])
        for site in sites:
            site = site.strip()
            if not site:
                continue
            pos = annotated.find(site)
            if pos == -1 and paper.title:
                site = paper.title
                pos = annotated.find(site)
            if pos == -1:
                continue
            insert_at = pos + len(site)
            if annotated[insert_at : insert_at + len(tag)] == tag:
                continue
            annotated = annotated[:insert_at] + tag + annotated[insert_at:]
    return annotated


def summarize_relation(
    excerpt: str,
    metadata: PaperMetadata,
    stated_relation: str | None,
    gateway: ResearchGateway,
) -> str | None:
    """1-2 sentence summary of how the paper relates to the project."""
    if not excerpt.strip():
        raise ValidationFailure("excerpt must be non-empty")
    request = build_request(
        TemplateId.PAPER_RELATION,
        {
            "document_excerpt": excerpt,
            "paper_title": metadata.title,
            "paper_abstract": metadata.abstract,
            "project_relation": stated_relation or "null",
        },
    )
    try:
        summary = gateway.complete(request).strip()
    except Exception as exc:  # noqa: BLE001 - relation is best-effort
        logger.warning("relation summary failed for %s: %s", metadata.paper_id, exc)
        return None
    return summary or None


class PaperCatalog:
    """Per-project catalog persistence and pipeline refresh."""

    def __init__(self, projects: ProjectStore, gateway: ResearchGateway):
        self.projects = projects
        self.gateway = gateway

    def load(self, project_id: str) -> list[PaperRef]:
        records = read_json(self.projects.papers_path(project_id), default=[])
        return [PaperRef.from_record(r) for r in records]

    def save(self, project_id: str, catalog: list[PaperRef]) -> None:
        atomic_write_json(
            self.projects.papers_path(project_id), [p.to_record() for p in catalog]
        )

    def active(self, project_id: str) -> list[PaperRef]:
        return [p for p in self.load(project_id) if not p.removed_by_user]

    def refresh(self, project_id: str, document_text: str) -> list[PaperRef]:
        """Extract + resolve mentions and merge into the stored catalog.

        Existing entries keep their user state (relation edits, removals);
        new resolved papers get a relation summary generated.
        """
        catalog = {p.paper_id: p for p in self.load(project_id)}
        mentions = extract_mentions(document_text, self.gateway)
        for mention in mentions:
            try:
                resolved = resolve_mention(mention, self.gateway)
            except TransientProviderError as exc:
                logger.warning("resolution left pending (provider outage): %s", exc)
                continue
            if resolved is None:
                continue
            existing = catalog.get(resolved.paper_id)
            if existing is None:
                metadata = PaperMetadata(
                    paper_id=resolved.paper_id,
                    title=resolved.title,
                    url=resolved.url,
                    abstract="",
                )
                fetched = self.gateway.lookup_paper(resolved.paper_id)
                if fetched is not None:
                    metadata = fetched
                if resolved.mention_contexts:
                    resolved.project_relation = summarize_relation(
                        resolved.mention_contexts[0],
                        metadata,
                        mention.project_relation,
                        self.gateway,
                    )
                catalog[resolved.paper_id] = resolved
            else:
                for context in resolved.mention_contexts:
                    if context not in existing.mention_contexts:
                        existing.mention_contexts.append(context)
        merged = list(catalog.values())
        self.save(project_id, merged)
        return merged

    # -- user actions ------------------------------------------------------

    def _find(self, project_id: str, paper_id: str) -> tuple[list[PaperRef], PaperRef]:
        catalog = self.load(project_id)
        for paper in catalog:
            if paper.paper_id == paper_id:
                return catalog, paper
        raise UnknownPaperError(f"no paper {paper_id!r} in project {project_id!r}")

    def edit_relation(self, project_id: str, paper_id: str, relation: str) -> PaperRef:
        catalog, paper = self._find(project_id, paper_id)
        paper.project_relation = relation
        paper.relation_user_edited = True
        self.save(project_id, catalog)
        return paper

    def remove_paper(self, project_id: str, paper_id: str) -> PaperRef:
        catalog, paper = self._find(project_id, paper_id)
        paper.removed_by_user = True
        self.save(project_id, catalog)
        return paper

    def restore_paper(self, project_id: str, paper_id: str) -> PaperRef:
        catalog, paper = self._find(project_id, paper_id)
        paper.removed_by_user = False
        self.save(project_id, catalog)
        return paper
