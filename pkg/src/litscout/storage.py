"""Atomic file I/O primitives for the on-disk state tree.

All writes go through write-temp-then-rename so a crash mid-run never
leaves a half-written file readable. JSONL files are logically
append-only; appends rewrite through a temp file for the same guarantee.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def dump_json(data: Any) -> str:
    """Canonical JSON serialization: stable key order, readable unicode."""
    return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def dump_json_line(data: Any) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False) + "\n"


def atomic_write_json(path: Path, data: Any) -> None:
    atomic_write_text(path, dump_json(data))


def read_json(path: Path, default: Any = None) -> Any:
    if not path.exists():
        return default
    return json.loads(path.read_text(encoding="utf-8"))


def append_jsonl(path: Path, records: list[dict[str, Any]]) -> None:
    if not records:
        return
    existing = path.read_text(encoding="utf-8") if path.exists() else ""
    new = "".join(dump_json_line(r) for r in records)
    atomic_write_text(path, existing + new)


def read_jsonl(path: Path) -> list[dict[str, Any]]:
    if not path.exists():
        return []
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            out.append(json.loads(line))
    return out


def append_lines(path: Path, lines: list[str]) -> None:
    if not lines:
        return
    existing = path.read_text(encoding="utf-8") if path.exists() else ""
    atomic_write_text(path, existing + "".join(line + "\n" for line in lines))


def read_lines(path: Path) -> list[str]:
    if not path.exists():
        return []
    return [line for line in path.read_text(encoding="utf-8").splitlines() if line]
