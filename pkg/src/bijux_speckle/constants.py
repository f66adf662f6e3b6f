"""Global constants shared by file formats and reproducibility records."""

from __future__ import annotations

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801

PGM_MAXVAL = 255
GRAY_LEVELS = 256
"""Histogram bins for 8-bit grayscale entropy."""

SURROGATE_MODEL_VERSION = "1"
"""Version of the scattering surrogate; bump whenever kernels change."""

OPERATOR_FORMAT_VERSION = 1
PATTERN_FORMAT_VERSION = 1

MODEL_MAGIC = b"SPSD1"

MANIFEST_SCHEMA_VERSION = 1
MANIFEST_MIN_RUNTIME = "0.1.0"

HADAMARD_MAX_ORDER_LOG2 = 14
"""Largest Hadamard order that may be materialized as a dense matrix."""

FAST_HADAMARD_MAX_ORDER_LOG2 = 24

SIGNIFICANCE_LEVEL = 0.01
QUANTIZATION_BITS = 16
