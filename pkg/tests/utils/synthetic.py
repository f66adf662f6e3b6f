"""Synthetic stand-ins for MNIST-like data and bitstreams."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.datasets import Image, LabeledDataset, write_idx
from bijux_speckle.nist import BitStream
from bijux_speckle.utilities.rng import SplitMix64


def stroke_pixels(label: int, size: int, jitter: NDArray[np.float64]) -> NDArray[np.uint8]:
    """A bright horizontal and vertical stroke whose positions encode ``label``."""
    frame = np.zeros((size, size), dtype=np.float64)
    band = max(1, size // 14)
    row = (2 + 2 * label) * size // 28
    col = (26 - 2 * label) * size // 28
    frame[row : row + band, size // 8 : size - size // 8] = 255.0
    frame[size // 8 : size - size // 8, col : col + band] = 200.0
    noisy = frame + jitter.reshape(size, size) * 20.0
    return np.clip(np.rint(noisy), 0, 255).astype(np.uint8)


def stroke_dataset(
    count: int, size: int = 28, seed: int = 0, num_classes: int = 10
) -> LabeledDataset:
    stream = SplitMix64(seed).spawn("tests", "strokes")
    labels = stream.spawn("labels").integers(count, num_classes)
    jitter = stream.spawn("jitter").uniform(count * size * size).reshape(count, -1)
    pixels = np.stack(
        [stroke_pixels(int(label), size, jitter[k]) for k, label in enumerate(labels)]
    )
    return LabeledDataset(pixels, labels, num_classes)


def ramp_image(width: int = 16, height: int = 16) -> Image:
    """Every gray level once per 256 pixels, row-major."""
    values = np.arange(width * height, dtype=np.int64) % 256
    return Image(values.reshape(height, width).astype(np.uint8))


def write_idx_pair(
    dataset: LabeledDataset, directory: Path, prefix: str, *, compress: bool = False
) -> tuple[Path, Path]:
    suffix = ".gz" if compress else ""
    images = directory / f"{prefix}-images-idx3-ubyte{suffix}"
    labels = directory / f"{prefix}-labels-idx1-ubyte{suffix}"
    write_idx(dataset, images, labels, compress=compress)
    return images, labels


def random_bits(count: int, seed: int) -> BitStream:
    return BitStream(SplitMix64(seed).spawn("tests", "bits").bits(count))
