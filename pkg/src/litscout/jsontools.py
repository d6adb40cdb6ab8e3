"""Tolerant JSON extraction from model output.

Model responses wrap JSON in prose, markdown fences, or scratchpad
blocks; these helpers find and parse the payload without being strict
about the wrapping.
"""

from __future__ import annotations

import json
import re
from typing import Any

from litscout.errors import OutputParseError

_SCRATCHPAD_RE = re.compile(r"<scratchpad>.*?</scratchpad>", re.DOTALL | re.IGNORECASE)
_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)\s*```", re.DOTALL)


def strip_scratchpad(text: str) -> str:
    return _SCRATCHPAD_RE.sub("", text)


def _balanced_slice(text: str, open_char: str, close_char: str) -> str | None:
    start = text.find(open_char)
    if start == -1:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if escaped:
            escaped = False
            continue
        if ch == "\\":
            escaped = True
            continue
        if ch == '"':
            in_string = not in_string
            continue
        if in_string:
            continue
        if ch == open_char:
            depth += 1
        elif ch == close_char:
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def _candidates(text: str, open_char: str, close_char: str) -> list[str]:
    text = strip_scratchpad(text)
    out = []
    fence = _FENCE_RE.search(text)
    if fence:
        out.append(fence.group(1))
    out.append(text.strip())
    sliced = _balanced_slice(text, open_char, close_char)
    if sliced:
        out.append(sliced)
    return out


def extract_json_object(text: str) -> dict[str, Any]:
    for candidate in _candidates(text, "{", "}"):
        try:
            value = json.loads(candidate)
        except json.JSONDecodeError:
            sliced = _balanced_slice(candidate, "{", "}")
            if sliced is None:
                continue
            try:
                value = json.loads(sliced)
            except json.JSONDecodeError:
                continue
        if isinstance(value, dict):
            return value
    raise OutputParseError("no JSON object found in provider output")


def extract_json_array(text: str) -> list[Any]:
    for candidate in _candidates(text, "[", "]"):
        try:
            value = json.loads(candidate)
        except json.JSONDecodeError:
            sliced = _balanced_slice(candidate, "[", "]")
            if sliced is None:
                continue
            try:
                value = json.loads(sliced)
            except json.JSONDecodeError:
                continue
        if isinstance(value, list):
            return value
        if isinstance(value, dict):
            # Some responses wrap the list in a one-key object.
            for wrapped in value.values():
                if isinstance(wrapped, list):
                    return wrapped
    raise OutputParseError("no JSON array found in provider output")
