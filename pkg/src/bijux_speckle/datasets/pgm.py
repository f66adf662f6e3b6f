"""Binary PGM (P5) reading and writing for 8-bit images."""

from __future__ import annotations

from collections.abc import Sequence
import logging
from pathlib import Path

import numpy as np

from bijux_speckle.constants import PGM_MAXVAL
from bijux_speckle.errors import (
    MalformedHeaderError,
    TruncatedFileError,
    UnsupportedMaxvalError,
)
from bijux_speckle.utilities.io import atomic_write_bytes

from .image import Image

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\r\n"


def encode_pgm(img: Image) -> bytes:
    header = f"P5\n{img.width} {img.height}\n{PGM_MAXVAL}\n".encode("ascii")
    return header + np.ascontiguousarray(img.pixels).tobytes()


def write_pgm(img: Image, path: str | Path) -> Path:
    return atomic_write_bytes(path, encode_pgm(img))


def _tokens(path: Path, raw: bytes, wanted: int) -> tuple[list[bytes], int]:
    """Read ``wanted`` header tokens, skipping ``#`` comments."""
    tokens: list[bytes] = []
    pos = 0
    while len(tokens) < wanted:
        while pos < len(raw) and raw[pos] in _WHITESPACE:
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and raw[pos] not in _WHITESPACE:
            pos += 1
        if start == pos:
            raise MalformedHeaderError(path, "header ends before all fields were read")
        tokens.append(raw[start:pos])
    if pos >= len(raw) or raw[pos] not in _WHITESPACE:
        raise MalformedHeaderError(path, "missing whitespace after maxval")
    return tokens, pos + 1


def read_pgm(path: str | Path) -> Image:
    source = Path(path)
    raw = source.read_bytes()
    if raw[:2] != b"P5":
        raise MalformedHeaderError(source, f"expected 'P5' magic, got {raw[:2]!r}")
    tokens, offset = _tokens(source, raw, 4)
    try:
        width, height, maxval = (int(token) for token in tokens[1:])
    except ValueError as exc:
        raise MalformedHeaderError(source, f"non-numeric header field: {exc}") from exc
    if width <= 0 or height <= 0:
        raise MalformedHeaderError(source, f"invalid size {width}x{height}")
    if maxval != PGM_MAXVAL:
        raise UnsupportedMaxvalError(source, maxval)
    expected = offset + width * height
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    data = np.frombuffer(raw, dtype=np.uint8, count=width * height, offset=offset)
    return Image(data.reshape(height, width))


def write_pgm_dir(images: Sequence[Image], directory: str | Path) -> list[Path]:
    """Write images as ``00000.pgm``, ``00001.pgm``, ... under ``directory``."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    paths = [write_pgm(img, target / f"{index:05d}.pgm") for index, img in enumerate(images)]
    logger.debug(
        "Wrote PGM directory",
        extra={"context": {"directory": str(target), "count": len(paths)}},
    )
    return paths


def read_pgm_dir(directory: str | Path) -> list[Image]:
    """Read every ``*.pgm`` file in ``directory`` in name order."""
    return [read_pgm(path) for path in sorted(Path(directory).glob("*.pgm"))]
