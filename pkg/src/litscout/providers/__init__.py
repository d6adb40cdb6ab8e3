from litscout.providers.base import (
    DeepResearchAnswer,
    DeepResearchProvider,
    LLMProvider,
    MetadataProvider,
    PaperMetadata,
)
from litscout.providers.gateway import ResearchGateway
from litscout.providers.mock import (
    ReplayDeepResearch,
    ReplayLLM,
    ReplayMetadata,
    TableMetadata,
    answer_fixture_path,
    question_hash,
    transcript_fixture_path,
)
from litscout.providers.prompts import PromptRequest, TemplateId, build_request, render_template

__all__ = [
    "DeepResearchAnswer",
    "DeepResearchProvider",
    "LLMProvider",
    "MetadataProvider",
    "PaperMetadata",
    "PromptRequest",
    "ReplayDeepResearch",
    "ReplayLLM",
    "ReplayMetadata",
    "ResearchGateway",
    "TableMetadata",
    "TemplateId",
    "answer_fixture_path",
    "build_request",
    "question_hash",
    "render_template",
    "transcript_fixture_path",
]
