"""Shannon entropy of images and datasets."""

from __future__ import annotations

from .shannon import (
    EntropyReport,
    dataset_entropy,
    histograms,
    image_entropy,
    write_entropy_csv,
)

__all__ = [
    "EntropyReport",
    "dataset_entropy",
    "histograms",
    "image_entropy",
    "write_entropy_csv",
]
