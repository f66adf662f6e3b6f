"""Binary and PGM export of scatter kernels and transfer matrices.

Binary layout: a 16-byte header of little-endian u32 ``rows, cols,
family code, format version`` followed by ``rows * cols`` little-endian
float64 values in row-major order. Kernels are written in wrap-around
coordinates; transfer matrices are written densely.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
import struct

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import OPERATOR_FORMAT_VERSION
from bijux_speckle.datasets.image import Image
from bijux_speckle.datasets.pgm import write_pgm
from bijux_speckle.enums import ScatterFamily
from bijux_speckle.errors import MalformedHeaderError, TruncatedFileError
from bijux_speckle.utilities.io import atomic_write_bytes

from .apply import rescale_to_gray
from .operator import ScatterOperator

_HEADER = struct.Struct("<4I")


@dataclass(frozen=True, eq=False)
class OperatorRecord:
    """Contents of an exported operator file."""

    family: ScatterFamily
    data: NDArray[np.float64]


def export_operator(op: ScatterOperator, path: str | Path) -> Path:
    data = np.ascontiguousarray(op.dense(), dtype="<f8")
    header = _HEADER.pack(
        data.shape[0], data.shape[1], op.family.code, OPERATOR_FORMAT_VERSION
    )
    return atomic_write_bytes(path, header + data.tobytes())


def read_operator(path: str | Path) -> OperatorRecord:
    source = Path(path)
    raw = source.read_bytes()
    if len(raw) < _HEADER.size:
        raise TruncatedFileError(source, expected=_HEADER.size, found=len(raw))
    rows, cols, code, version = _HEADER.unpack_from(raw)
    if version != OPERATOR_FORMAT_VERSION:
        raise MalformedHeaderError(source, f"unsupported format version {version}")
    try:
        family = ScatterFamily.from_code(code)
    except ValueError as exc:
        raise MalformedHeaderError(source, str(exc)) from exc
    expected = _HEADER.size + rows * cols * 8
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    data = np.frombuffer(raw, dtype="<f8", count=rows * cols, offset=_HEADER.size)
    return OperatorRecord(family, data.reshape(rows, cols).astype(np.float64))


def write_kernel_pgm(op: ScatterOperator, path: str | Path) -> Path:
    """Centered kernel (or dense matrix) stretched to 8-bit for viewing."""
    data = op.dense()
    if op.kernel is not None:
        data = np.fft.fftshift(data)
    return write_pgm(Image(rescale_to_gray(data)), path)
