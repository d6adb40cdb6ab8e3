from litscout.suggestions.engine import (
    dedup_seen,
    generate_suggestions,
    load_seen_hashes,
    mark_delivered,
    rank_suggestions,
    validate_citation_labels,
)
from litscout.suggestions.models import (
    GenerationResult,
    PaperLabel,
    ParsedGeneration,
    ParsedSuggestion,
    SentenceAnchor,
    Suggestion,
    content_hash_for,
    suggestion_id_for,
)
from litscout.suggestions.parser import parse_generation_output, render_generation_output

__all__ = [
    "GenerationResult",
    "PaperLabel",
    "ParsedGeneration",
    "ParsedSuggestion",
    "SentenceAnchor",
    "Suggestion",
    "content_hash_for",
    "dedup_seen",
    "generate_suggestions",
    "load_seen_hashes",
    "mark_delivered",
    "parse_generation_output",
    "rank_suggestions",
    "render_generation_output",
    "suggestion_id_for",
    "validate_citation_labels",
]
