"""IDX reader for MNIST-style image and label files (plain or gzip)."""

from __future__ import annotations

import gzip
import logging
from pathlib import Path
import struct

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import IDX_IMAGE_MAGIC, IDX_LABEL_MAGIC
from bijux_speckle.errors import (
    BadMagicError,
    CountMismatchError,
    MalformedHeaderError,
    TruncatedFileError,
)
from bijux_speckle.utilities.io import atomic_write_bytes

from .image import LabeledDataset

logger = logging.getLogger(__name__)

_GZIP_MAGIC = b"\x1f\x8b"


def _read_raw(path: Path) -> bytes:
    raw = path.read_bytes()
    if raw[:2] == _GZIP_MAGIC:
        try:
            return gzip.decompress(raw)
        except (OSError, EOFError) as exc:
            raise MalformedHeaderError(path, f"corrupt gzip stream: {exc}") from exc
    return raw


def _header(path: Path, raw: bytes, fields: int) -> tuple[int, ...]:
    size = 4 * fields
    if len(raw) < size:
        raise TruncatedFileError(path, expected=size, found=len(raw))
    return struct.unpack(f">{fields}I", raw[:size])


def read_idx_images(path: str | Path) -> NDArray[np.uint8]:
    """Return a ``(count, rows, cols)`` uint8 stack from an image IDX file."""
    source = Path(path)
    raw = _read_raw(source)
    magic = _header(source, raw, 1)[0]
    if magic != IDX_IMAGE_MAGIC:
        raise BadMagicError(source, found=magic, expected=IDX_IMAGE_MAGIC)
    _, count, rows, cols = _header(source, raw, 4)
    expected = 16 + count * rows * cols
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    data = np.frombuffer(raw, dtype=np.uint8, count=count * rows * cols, offset=16)
    return data.reshape(count, rows, cols)


def read_idx_labels(path: str | Path) -> NDArray[np.uint8]:
    source = Path(path)
    raw = _read_raw(source)
    magic = _header(source, raw, 1)[0]
    if magic != IDX_LABEL_MAGIC:
        raise BadMagicError(source, found=magic, expected=IDX_LABEL_MAGIC)
    _, count = _header(source, raw, 2)
    expected = 8 + count
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    return np.frombuffer(raw, dtype=np.uint8, count=count, offset=8)


def load_idx(
    image_path: str | Path, label_path: str | Path, num_classes: int = 10
) -> LabeledDataset:
    """Load an IDX image file together with its label file."""
    images = read_idx_images(image_path)
    labels = read_idx_labels(label_path)
    if images.shape[0] != labels.shape[0]:
        raise CountMismatchError(
            label_path, images=images.shape[0], labels=labels.shape[0]
        )
    dataset = LabeledDataset(images, labels.astype(np.int64), num_classes)
    logger.info(
        "Loaded IDX dataset",
        extra={
            "context": {
                "images": str(image_path),
                "count": len(dataset),
                "height": dataset.height,
                "width": dataset.width,
            }
        },
    )
    return dataset


def write_idx(
    dataset: LabeledDataset,
    image_path: str | Path,
    label_path: str | Path,
    *,
    compress: bool = False,
) -> tuple[Path, Path]:
    """Write ``dataset`` as an IDX image/label pair; each file is replaced atomically."""
    count = len(dataset)
    image_bytes = struct.pack(
        ">4I", IDX_IMAGE_MAGIC, count, dataset.height, dataset.width
    ) + np.ascontiguousarray(dataset.pixels).tobytes()
    label_bytes = struct.pack(">2I", IDX_LABEL_MAGIC, count) + dataset.labels.astype(
        np.uint8
    ).tobytes()
    if compress:
        image_bytes = gzip.compress(image_bytes, mtime=0)
        label_bytes = gzip.compress(label_bytes, mtime=0)
    return (
        atomic_write_bytes(image_path, image_bytes),
        atomic_write_bytes(label_path, label_bytes),
    )
