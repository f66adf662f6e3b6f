"""Decoder model files.

Layout: magic ``SPSD1``, one mode byte (0 fixed patterns, 1 end-to-end),
little-endian u32 ``features, hidden, classes, n_active`` (``n_active`` is
0 without a pattern bank), then little-endian float64 arrays in the order
scale, patterns (end-to-end only), w1, b1, w2, b2.
"""

from __future__ import annotations

from pathlib import Path
import struct

import numpy as np

from bijux_speckle.constants import MODEL_MAGIC
from bijux_speckle.enums import TrainMode
from bijux_speckle.errors import MalformedHeaderError, TruncatedFileError
from bijux_speckle.utilities.io import atomic_write_bytes

from .model import DecoderModel

_DIMS = struct.Struct("<4I")
_MODE_CODES = {TrainMode.FIXED_PATTERNS: 0, TrainMode.END_TO_END: 1}


def save_model(model: DecoderModel, path: str | Path) -> Path:
    header = (
        MODEL_MAGIC
        + bytes([_MODE_CODES[model.mode]])
        + _DIMS.pack(model.n_features, model.hidden, model.num_classes, model.n_active)
    )
    arrays = [model.scale]
    if model.patterns is not None:
        arrays.append(model.patterns)
    arrays.extend([model.w1, model.b1, model.w2, model.b2])
    payload = b"".join(np.ascontiguousarray(a, dtype="<f8").tobytes() for a in arrays)
    return atomic_write_bytes(path, header + payload)


def load_model(path: str | Path) -> DecoderModel:
    source = Path(path)
    raw = source.read_bytes()
    prefix = len(MODEL_MAGIC) + 1 + _DIMS.size
    if len(raw) < prefix:
        raise TruncatedFileError(source, expected=prefix, found=len(raw))
    if raw[: len(MODEL_MAGIC)] != MODEL_MAGIC:
        raise MalformedHeaderError(source, f"bad model magic {raw[:5]!r}")
    codes = {code: mode for mode, code in _MODE_CODES.items()}
    mode_code = raw[len(MODEL_MAGIC)]
    if mode_code not in codes:
        raise MalformedHeaderError(source, f"unknown mode byte {mode_code}")
    mode = codes[mode_code]
    n_features, hidden, classes, n_active = _DIMS.unpack_from(raw, len(MODEL_MAGIC) + 1)
    shapes: list[tuple[int, ...]] = [(n_features,)]
    if n_active:
        shapes.append((n_features, n_active))
    shapes.extend([(hidden, n_features), (hidden,), (classes, hidden), (classes,)])
    sizes = [int(np.prod(shape)) for shape in shapes]
    expected = prefix + 8 * sum(sizes)
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    offset = prefix
    arrays = []
    for shape, size in zip(shapes, sizes, strict=True):
        chunk = np.frombuffer(raw, dtype="<f8", count=size, offset=offset)
        arrays.append(chunk.reshape(shape).astype(np.float64))
        offset += 8 * size
    scale = arrays.pop(0)
    patterns = arrays.pop(0) if n_active else None
    w1, b1, w2, b2 = arrays
    return DecoderModel(
        mode=mode, w1=w1, b1=b1, w2=w2, b2=b2, scale=scale, patterns=patterns
    )
