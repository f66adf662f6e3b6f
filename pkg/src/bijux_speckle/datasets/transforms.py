"""Resampling and subsetting of images and datasets."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.errors import EmptyDatasetError, ParamOutOfRangeError, ZeroDimensionError
from bijux_speckle.utilities.rng import SplitMix64

from .image import Image, LabeledDataset


def _nearest_indices(source: int, target: int) -> NDArray[np.int64]:
    # Destination index j samples source index floor(j * source / target).
    return (np.arange(target, dtype=np.int64) * source) // target


def _resize_stack(
    stack: NDArray[np.uint8], new_width: int, new_height: int
) -> NDArray[np.uint8]:
    if new_width <= 0 or new_height <= 0:
        raise ZeroDimensionError(
            f"resize target must be positive, got {new_width}x{new_height}"
        )
    rows = _nearest_indices(stack.shape[-2], new_height)
    cols = _nearest_indices(stack.shape[-1], new_width)
    return stack[..., rows[:, None], cols[None, :]]


def resize_nearest(img: Image, new_width: int, new_height: int) -> Image:
    """Nearest-neighbour resample; never creates new intensity values."""
    if (new_width, new_height) == (img.width, img.height):
        return img
    return Image(_resize_stack(img.pixels, new_width, new_height))


def resize_dataset(ds: LabeledDataset, new_width: int, new_height: int) -> LabeledDataset:
    if (new_width, new_height) == (ds.width, ds.height):
        return ds
    return LabeledDataset(
        _resize_stack(ds.pixels, new_width, new_height), ds.labels, ds.num_classes
    )


def subset(ds: LabeledDataset, count: int, seed: int) -> LabeledDataset:
    """Seeded subset of ``count`` images, kept in their original order."""
    if len(ds) == 0:
        raise EmptyDatasetError("cannot take a subset of an empty dataset")
    if count <= 0 or count > len(ds):
        raise ParamOutOfRangeError(
            f"subset size {count} outside [1, {len(ds)}]"
        )
    if count == len(ds):
        return ds
    chosen = np.sort(SplitMix64(seed).spawn("subset").permutation(len(ds))[:count])
    return LabeledDataset(ds.pixels[chosen], ds.labels[chosen], ds.num_classes)
