"""Modulation patterns: Hadamard sets, field-of-view masks, learned sets."""

from __future__ import annotations

from .export import (
    PatternRecord,
    export_patterns_binary,
    export_patterns_pgm,
    read_patterns_binary,
)
from .fast import HadamardSampler, measure_hadamard_fast
from .hadamard import fwht, hadamard_matrix, hadamard_rows
from .mask import FovMask, make_mask
from .pattern_set import (
    PatternSet,
    build_hadamard_patterns,
    fold_transfer_matrix,
    learned_pattern_set,
    modulator_patterns,
    pattern_count,
    quantize_patterns,
)

__all__ = [
    "FovMask",
    "HadamardSampler",
    "PatternRecord",
    "PatternSet",
    "build_hadamard_patterns",
    "export_patterns_binary",
    "export_patterns_pgm",
    "fold_transfer_matrix",
    "fwht",
    "hadamard_matrix",
    "hadamard_rows",
    "learned_pattern_set",
    "make_mask",
    "measure_hadamard_fast",
    "modulator_patterns",
    "pattern_count",
    "quantize_patterns",
    "read_patterns_binary",
]
