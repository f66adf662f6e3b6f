"""Pattern export: PGM stacks and a single binary file.

Binary layout: little-endian u32 ``m, width, height, kind code`` followed
by ``m * height * width`` little-endian float64 values clipped to [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import struct

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.datasets.image import Image
from bijux_speckle.datasets.pgm import write_pgm
from bijux_speckle.enums import PatternKind
from bijux_speckle.errors import MalformedHeaderError, TruncatedFileError
from bijux_speckle.utilities.io import atomic_write_bytes
from bijux_speckle.utilities.numeric import round_half_up

from .pattern_set import PatternSet

_HEADER = struct.Struct("<4I")


@dataclass(frozen=True, eq=False)
class PatternRecord:
    kind: PatternKind
    frames: NDArray[np.float64]


def export_patterns_pgm(ps: PatternSet, directory: str | Path) -> list[Path]:
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    frames = np.clip(ps.patterns, 0.0, 1.0)
    paths = []
    for index, frame in enumerate(frames):
        gray = round_half_up(frame * 255.0).astype(np.uint8)
        paths.append(write_pgm(Image(gray), target / f"pattern_{index:05d}.pgm"))
    return paths


def export_patterns_binary(ps: PatternSet, path: str | Path) -> Path:
    header = _HEADER.pack(ps.m, ps.width, ps.height, ps.kind.code)
    payload = np.ascontiguousarray(np.clip(ps.patterns, 0.0, 1.0), dtype="<f8")
    return atomic_write_bytes(path, header + payload.tobytes())


def read_patterns_binary(path: str | Path) -> PatternRecord:
    source = Path(path)
    raw = source.read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(source, expected=_HEADER.size, found=len(raw))
    count, width, height, code = _HEADER.unpack_from(raw)
    try:
        kind = PatternKind.from_code(code)
    except ValueError as exc:
        raise MalformedHeaderError(source, str(exc)) from exc
    values = count * width * height
    expected = _HEADER.size + 8 * values
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    frames = np.frombuffer(raw, dtype="<f8", count=values, offset=_HEADER.size)
    return PatternRecord(kind, frames.reshape(count, height, width).astype(np.float64))
