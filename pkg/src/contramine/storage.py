"""JSON/JSONL reading helpers and atomic file writes.

All CLI outputs go through the atomic writers (temp file + rename) so a
crashed run never leaves a half-written artifact behind.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Iterator

from .errors import ParseError


def read_jsonl(path: str | os.PathLike) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) for every non-blank line of a JSONL file."""
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                record = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", path=str(path), line=lineno) from exc
            if not isinstance(record, dict):
                raise ParseError("expected a JSON object", path=str(path), line=lineno)
            yield lineno, record


def _atomic_write(path: Path, write_fn) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            write_fn(fh)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_text_atomic(path: str | os.PathLike, text: str) -> None:
    _atomic_write(Path(path), lambda fh: fh.write(text))


def write_jsonl_atomic(path: str | os.PathLike, records: Iterable[dict]) -> None:
    def _write(fh):
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")

    _atomic_write(Path(path), _write)


def write_json_atomic(path: str | os.PathLike, obj: Any, *, indent: int = 2) -> None:
    _atomic_write(Path(path), lambda fh: fh.write(json.dumps(obj, ensure_ascii=False, indent=indent) + "\n"))
