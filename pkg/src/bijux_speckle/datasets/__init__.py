"""Benchmark image ingestion: IDX and PGM files, resizing, subsets."""

from __future__ import annotations

from .idx import load_idx, read_idx_images, read_idx_labels, write_idx
from .image import Image, LabeledDataset
from .pgm import encode_pgm, read_pgm, read_pgm_dir, write_pgm, write_pgm_dir
from .transforms import resize_dataset, resize_nearest, subset

__all__ = [
    "Image",
    "LabeledDataset",
    "encode_pgm",
    "load_idx",
    "read_idx_images",
    "read_idx_labels",
    "read_pgm",
    "read_pgm_dir",
    "resize_dataset",
    "resize_nearest",
    "subset",
    "write_idx",
    "write_pgm",
    "write_pgm_dir",
]
