"""Seeded surrogate scattering media applied to 8-bit images."""

from __future__ import annotations

from .apply import convolve, rescale_to_gray, scatter, scatter_dataset
from .config import ScatterConfig, anisotropy_to_strength, density_to_strength
from .export import OperatorRecord, export_operator, read_operator, write_kernel_pgm
from .operator import ScatterOperator, build_operator

__all__ = [
    "OperatorRecord",
    "ScatterConfig",
    "ScatterOperator",
    "anisotropy_to_strength",
    "build_operator",
    "convolve",
    "density_to_strength",
    "export_operator",
    "read_operator",
    "rescale_to_gray",
    "scatter",
    "scatter_dataset",
    "write_kernel_pgm",
]
