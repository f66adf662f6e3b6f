"""Measurement files.

CSV: header ``label,v0,...``, then one row per vector (empty label when
unknown). Binary: little-endian u64 ``count`` and ``m``, then
``count * m`` little-endian float64 values.
"""

from __future__ import annotations

from collections.abc import Sequence
import csv
from dataclasses import dataclass
from pathlib import Path
import struct

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.errors import MalformedHeaderError, TruncatedFileError
from bijux_speckle.utilities.io import atomic_write_bytes, atomic_write_csv

from .forward import Measurement, stack_values

_BINARY_HEADER = struct.Struct("<2Q")


@dataclass(frozen=True, eq=False)
class MeasurementTable:
    values: NDArray[np.float64]
    labels: NDArray[np.int64] | None = None

    def __len__(self) -> int:
        return int(self.values.shape[0])


def write_measurements_csv(measurements: Sequence[Measurement], path: str | Path) -> Path:
    width = measurements[0].m if measurements else 0
    header = ["label", *(f"v{index}" for index in range(width))]
    rows = (
        ["" if item.label is None else item.label, *map(float, item.values)]
        for item in measurements
    )
    return atomic_write_csv(path, header, rows)


def read_measurements_csv(path: str | Path) -> MeasurementTable:
    source = Path(path)
    with source.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if not header or header[0] != "label":
            raise MalformedHeaderError(source, "expected a 'label,v0,...' header")
        rows = list(reader)
    width = len(header) - 1
    values = np.zeros((len(rows), width), dtype=np.float64)
    labels: list[int | None] = []
    for line, row in enumerate(rows, start=2):
        if len(row) != width + 1:
            raise MalformedHeaderError(source, f"line {line} has {len(row)} fields")
        labels.append(int(row[0]) if row[0] else None)
        values[line - 2] = [float(cell) for cell in row[1:]]
    if any(label is None for label in labels):
        return MeasurementTable(values)
    return MeasurementTable(values, np.asarray(labels, dtype=np.int64))


def write_measurements_binary(
    measurements: Sequence[Measurement], path: str | Path
) -> Path:
    values = np.ascontiguousarray(stack_values(measurements), dtype="<f8")
    header = _BINARY_HEADER.pack(values.shape[0], values.shape[1] if values.ndim == 2 else 0)
    return atomic_write_bytes(path, header + values.tobytes())


def read_measurements_binary(path: str | Path) -> MeasurementTable:
    source = Path(path)
    raw = source.read_bytes()
    if len(raw) < _BINARY_HEADER.size:
        raise TruncatedFileError(source, expected=_BINARY_HEADER.size, found=len(raw))
    count, width = _BINARY_HEADER.unpack_from(raw)
    expected = _BINARY_HEADER.size + 8 * count * width
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    values = np.frombuffer(raw, dtype="<f8", count=count * width, offset=_BINARY_HEADER.size)
    return MeasurementTable(values.reshape(count, width).astype(np.float64))
