"""Compressed single-pixel measurements and their file formats."""

from __future__ import annotations

from .forward import (
    Measurement,
    add_noise,
    labels_of,
    measure,
    measure_array,
    measure_dataset,
    stack_values,
)
from .io import (
    MeasurementTable,
    read_measurements_binary,
    read_measurements_csv,
    write_measurements_binary,
    write_measurements_csv,
)

__all__ = [
    "Measurement",
    "MeasurementTable",
    "add_noise",
    "labels_of",
    "measure",
    "measure_array",
    "measure_dataset",
    "read_measurements_binary",
    "read_measurements_csv",
    "stack_values",
    "write_measurements_binary",
    "write_measurements_csv",
]
