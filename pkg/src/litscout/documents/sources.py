"""Pluggable document sources: local files, HTTP URLs, custom connectors."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from enum import Enum
from pathlib import Path
from typing import Callable

import requests

from litscout.errors import (
    MalformedAddressError,
    PermissionDeniedError,
    UnreachableSourceError,
    UnsupportedContentError,
)

logger = logging.getLogger(__name__)


class SourceKind(str, Enum):
    LOCAL_FILE = "local_file"
    HTTP_URL = "http_url"
    CONNECTOR = "connector"


class ContentKind(str, Enum):
    MARKDOWN = "markdown"
    PLAIN_TEXT = "plain_text"
    HTML = "html"


@dataclass(frozen=True)
class SourceLocator:
    source_id: str
    kind: SourceKind
    address: str
    display_name: str = ""

    def to_record(self) -> dict:
        return {
            "source_id": self.source_id,
            "kind": self.kind.value,
            "address": self.address,
            "display_name": self.display_name,
        }

    @classmethod
    def from_record(cls, record: dict) -> "SourceLocator":
        return cls(
            source_id=record["source_id"],
            kind=SourceKind(record["kind"]),
            address=record["address"],
            display_name=record.get("display_name", ""),
        )


@dataclass
class FetchResult:
    raw: bytes
    last_modified: datetime | None
    content_kind: ContentKind
    headers: dict = field(default_factory=dict)


# Connector extension point: name -> callable(address_rest) -> FetchResult.
_CONNECTORS: dict[str, Callable[[str], FetchResult]] = {}


def register_connector(name: str, fetch: Callable[[str], FetchResult]) -> None:
    _CONNECTORS[name] = fetch


def validate_address(kind: SourceKind, address: str) -> None:
    if not address or not address.strip():
        raise MalformedAddressError("source address must be non-empty")
    if kind == SourceKind.HTTP_URL and not address.startswith(("http://", "https://")):
        raise MalformedAddressError(f"not an http(s) url: {address!r}")
    if kind == SourceKind.CONNECTOR and ":" not in address:
        raise MalformedAddressError(
            "connector address must look like '<connector-name>:<payload>'"
        )


_EXTENSION_KINDS = {
    ".md": ContentKind.MARKDOWN,
    ".markdown": ContentKind.MARKDOWN,
    ".txt": ContentKind.PLAIN_TEXT,
    ".text": ContentKind.PLAIN_TEXT,
    ".html": ContentKind.HTML,
    ".htm": ContentKind.HTML,
}


def _kind_from_path(path: str) -> ContentKind:
    suffix = Path(path).suffix.lower()
    return _EXTENSION_KINDS.get(suffix, ContentKind.MARKDOWN)


def _kind_from_content_type(content_type: str, url: str) -> ContentKind:
    base = content_type.split(";")[0].strip().lower()
    if base == "text/html":
        return ContentKind.HTML
    if base in ("text/markdown", "text/x-markdown"):
        return ContentKind.MARKDOWN
    if base == "text/plain":
        return ContentKind.PLAIN_TEXT
    if base:
        if not base.startswith("text/"):
            raise UnsupportedContentError(f"unsupported content type {base!r}")
        return _kind_from_path(url)
    return _kind_from_path(url)


def _fetch_local(address: str) -> FetchResult:
    path = Path(address)
    try:
        raw = path.read_bytes()
        mtime = path.stat().st_mtime
    except FileNotFoundError as exc:
        raise UnreachableSourceError(f"no such file: {address}") from exc
    except PermissionError as exc:
        raise PermissionDeniedError(f"cannot read {address}") from exc
    last_modified = datetime.fromtimestamp(mtime, tz=timezone.utc)
    return FetchResult(raw=raw, last_modified=last_modified, content_kind=_kind_from_path(address))


def _fetch_http(address: str, timeout: float) -> FetchResult:
    try:
        response = requests.get(address, timeout=timeout)
    except requests.RequestException as exc:
        raise UnreachableSourceError(f"fetch failed for {address}: {exc}") from exc
    if response.status_code in (401, 403):
        raise PermissionDeniedError(f"{address} returned {response.status_code}")
    if response.status_code >= 400:
        raise UnreachableSourceError(f"{address} returned {response.status_code}")
    last_modified = None
    header = response.headers.get("Last-Modified")
    if header:
        try:
            last_modified = parsedate_to_datetime(header).astimezone(timezone.utc)
        except (TypeError, ValueError):
            logger.warning("unparseable Last-Modified header %r from %s", header, address)
    kind = _kind_from_content_type(response.headers.get("Content-Type", ""), address)
    return FetchResult(
        raw=response.content,
        last_modified=last_modified,
        content_kind=kind,
        headers=dict(response.headers),
    )


def _fetch_connector(address: str) -> FetchResult:
    name, _, rest = address.partition(":")
    fetch = _CONNECTORS.get(name)
    if fetch is None:
        raise UnreachableSourceError(f"no connector registered under {name!r}")
    return fetch(rest)


def fetch_document(locator: SourceLocator, timeout: float = 30.0) -> FetchResult:
    """Fetch raw content plus the source-reported last-modified time."""
    validate_address(locator.kind, locator.address)
    if locator.kind == SourceKind.LOCAL_FILE:
        return _fetch_local(locator.address)
    if locator.kind == SourceKind.HTTP_URL:
        return _fetch_http(locator.address, timeout)
    return _fetch_connector(locator.address)
