"""Deterministic file emission helpers.

Every artifact is written atomically (temp file in the target directory,
then rename) so a crashed run never leaves a half-written CSV that a
later run would happily parse. Formatting is fixed: UTF-8 without BOM,
\\n newlines, floats at six decimals, JSON with sorted keys. Two runs
over the same inputs must produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

PathLike = Union[str, Path]


def format_float(value: Optional[float], places: int = 6) -> str:
    """Fixed-point rendering; None becomes an empty cell."""
    if value is None:
        return ""
    return f"{value:.{places}f}"


def atomic_write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    return path


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if cell is None else cell for cell in row])
    return atomic_write_text(path, buf.getvalue())


def write_json(path: PathLike, payload: object) -> Path:
    text = json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    return atomic_write_text(path, text)


def write_jsonl(path: PathLike, records: Iterable[dict]) -> Path:
    lines = [json.dumps(r, ensure_ascii=False, sort_keys=True) for r in records]
    return atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def write_tsv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    parts = ["\t".join(header)]
    for row in rows:
        cells = ["" if cell is None else str(cell) for cell in row]
        for cell in cells:
            if "\t" in cell or "\n" in cell:
                raise ValueError(f"TSV cell contains a separator: {cell!r}")
        parts.append("\t".join(cells))
    return atomic_write_text(path, "\n".join(parts) + "\n")


def sanitize_token(token: str) -> str:
    """File-name-safe form of a system/source identifier."""
    return "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in token)
