from litscout.documents.normalize import normalize
from litscout.documents.sentences import SentenceEntry, segment_sentences
from litscout.documents.sources import (
    ContentKind,
    FetchResult,
    SourceKind,
    SourceLocator,
    fetch_document,
    register_connector,
)

# DocumentStore lives in litscout.documents.store; importing it here would
# cycle through litscout.projects.

__all__ = [
    "ContentKind",
    "FetchResult",
    "SentenceEntry",
    "SourceKind",
    "SourceLocator",
    "fetch_document",
    "normalize",
    "register_connector",
    "segment_sentences",
]
