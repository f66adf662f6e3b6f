"""Atomic file writes for result artifacts."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
import csv
import io
import os
from pathlib import Path
import tempfile


def atomic_write_bytes(path: str | Path, data: bytes) -> Path:
    """Write to a temporary sibling, then rename over ``path``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(
        prefix=f".{target.name}.", suffix=".tmp", dir=target.parent
    )
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, target)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return target


def atomic_write_text(path: str | Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def format_float(value: float) -> str:
    """Shortest round-trip representation, stable across runs."""
    return repr(float(value))


def render_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [format_float(cell) if isinstance(cell, float) else cell for cell in row]
        )
    return buffer.getvalue()


def atomic_write_csv(
    path: str | Path, header: Sequence[str], rows: Iterable[Sequence[object]]
) -> Path:
    return atomic_write_text(path, render_csv(header, rows))
