"""Normalize fetched documents to UTF-8 markdown.

Markdown and plain text pass through byte-identical (plain text is valid
markdown). HTML is converted with a small deterministic converter that
preserves headings, lists, links, and emphasis. Dates in the source stay
verbatim: nothing rewrites body text.
"""

from __future__ import annotations

import re
from html.parser import HTMLParser

from litscout.documents.sources import ContentKind
from litscout.errors import NormalizeError, UnsupportedContentError

_BLOCK_TAGS = {"p", "div", "section", "article", "br", "tr", "table"}
_SKIP_TAGS = {"script", "style", "head", "title"}


class _HtmlToMarkdown(HTMLParser):
    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.blocks: list[str] = []
        self.current: list[str] = []
        self._skip_depth = 0
        self._list_stack: list[str] = []  # "ul" | "ol"
        self._ol_counters: list[int] = []
        self._href: str | None = None
        self._link_text: list[str] = []

    def _flush_block(self) -> None:
        text = re.sub(r"[ \t]+", " ", "".join(self.current)).strip()
        self.current = []
        if text:
            self.blocks.append(text)

    def _emit(self, text: str) -> None:
        if self._href is not None:
            self._link_text.append(text)
        else:
            self.current.append(text)

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
            return
        if self._skip_depth:
            return
        if tag in {"h1", "h2", "h3", "h4", "h5", "h6"}:
            self._flush_block()
            self.current.append("#" * int(tag[1]) + " ")
        elif tag in {"ul", "ol"}:
            self._flush_block()
            self._list_stack.append(tag)
            if tag == "ol":
                self._ol_counters.append(0)
        elif tag == "li":
            self._flush_block()
            if self._list_stack and self._list_stack[-1] == "ol":
                self._ol_counters[-1] += 1
                self.current.append(f"{self._ol_counters[-1]}. ")
            else:
                self.current.append("- ")
        elif tag == "a":
            href = dict(attrs).get("href") or ""
            self._href = href
            self._link_text = []
        elif tag in {"strong", "b"}:
            self._emit("**")
        elif tag in {"em", "i"}:
            self._emit("*")
        elif tag == "code":
            self._emit("`")
        elif tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_endtag(self, tag: str) -> None:
        if tag in _SKIP_TAGS:
            self._skip_depth = max(0, self._skip_depth - 1)
            return
        if self._skip_depth:
            return
        if tag in {"h1", "h2", "h3", "h4", "h5", "h6", "li"}:
            self._flush_block()
        elif tag in {"ul", "ol"}:
            self._flush_block()
            if self._list_stack:
                popped = self._list_stack.pop()
                if popped == "ol" and self._ol_counters:
                    self._ol_counters.pop()
        elif tag == "a":
            label = "".join(self._link_text).strip()
            href = self._href or ""
            self._href = None
            if href:
                self.current.append(f"[{label}]({href})")
            else:
                self.current.append(label)
        elif tag in {"strong", "b"}:
            self._emit("**")
        elif tag in {"em", "i"}:
            self._emit("*")
        elif tag == "code":
            self._emit("`")
        elif tag in _BLOCK_TAGS:
            self._flush_block()

    def handle_data(self, data: str) -> None:
        if self._skip_depth:
            return
        self._emit(data.replace("\n", " "))

    def result(self) -> str:
        self._flush_block()
        return "\n\n".join(self.blocks)


def html_to_markdown(html: str) -> str:
    parser = _HtmlToMarkdown()
    parser.feed(html)
    parser.close()
    return parser.result()


def normalize(raw_bytes: bytes, content_kind: ContentKind | str) -> str:
    """Decode raw content and convert it to markdown text."""
    kind = ContentKind(content_kind)
    try:
        text = raw_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise NormalizeError(f"content is not valid UTF-8: {exc}") from exc

    if kind in (ContentKind.MARKDOWN, ContentKind.PLAIN_TEXT):
        return text
    if kind == ContentKind.HTML:
        return html_to_markdown(text)
    raise UnsupportedContentError(f"cannot normalize content kind {kind!r}")
