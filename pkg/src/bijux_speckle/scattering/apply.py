"""Applying scatter operators to images and datasets."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from bijux_speckle.datasets.image import Image, LabeledDataset
from bijux_speckle.errors import DimensionMismatchError
from bijux_speckle.utilities.numeric import round_half_up

from .operator import ScatterOperator

logger = logging.getLogger(__name__)

_BATCH = 256


def _check_shape(op: ScatterOperator, shape: tuple[int, ...]) -> None:
    if tuple(shape[-2:]) != op.shape:
        raise DimensionMismatchError(
            f"operator built for {op.width}x{op.height}, "
            f"image is {shape[-1]}x{shape[-2]}"
        )


def convolve(
    op: ScatterOperator, array: NDArray[np.floating], *, workers: int = 1
) -> NDArray[np.float64]:
    """Pre-rescale transform of one image or a ``(count, h, w)`` stack.

    Kernel families use circular convolution; the transfer-matrix family
    multiplies each row-major flattened image by the matrix.
    """
    values = np.asarray(array, dtype=np.float64)
    _check_shape(op, values.shape)
    if op.is_identity:
        return values.copy()
    if op.matrix is not None:
        flat = values.reshape(-1, op.width * op.height)
        mixed = (op.matrix @ flat.T).T
        return np.asarray(mixed, dtype=np.float64).reshape(values.shape)
    assert op.kernel is not None
    spectrum = fft.rfft2(op.kernel, workers=workers)
    out = fft.irfft2(
        fft.rfft2(values, axes=(-2, -1), workers=workers) * spectrum,
        s=op.shape,
        axes=(-2, -1),
        workers=workers,
    )
    return np.asarray(out, dtype=np.float64)


def rescale_to_gray(values: NDArray[np.float64]) -> NDArray[np.uint8]:
    """Affine map of each image's [min, max] onto [0, 255], rounded half up.

    A constant image has no range to stretch and is rounded in place.
    """
    lo = values.min(axis=(-2, -1), keepdims=True)
    hi = values.max(axis=(-2, -1), keepdims=True)
    span = hi - lo
    flat = span <= 1e-12 * np.maximum(1.0, np.abs(hi))
    safe_span = np.where(flat, 1.0, span)
    scaled = np.where(flat, values, (values - lo) / safe_span * 255.0)
    return np.clip(round_half_up(scaled), 0, 255).astype(np.uint8)


def scatter(op: ScatterOperator, img: Image) -> Image:
    """Scatter ``img`` and bring the result back to the 8-bit range."""
    _check_shape(op, img.shape)
    if op.is_identity:
        return img
    return Image(rescale_to_gray(convolve(op, img.pixels)))


def scatter_dataset(
    op: ScatterOperator, ds: LabeledDataset, *, workers: int = 1
) -> LabeledDataset:
    """Scatter every image; labels and order are unchanged."""
    _check_shape(op, ds.pixels.shape)
    if op.is_identity:
        return ds
    out = np.empty_like(ds.pixels)
    for start in range(0, len(ds), _BATCH):
        stop = min(start + _BATCH, len(ds))
        out[start:stop] = rescale_to_gray(
            convolve(op, ds.pixels[start:stop], workers=workers)
        )
    logger.info(
        "Scattered dataset",
        extra={
            "context": {
                "family": op.family.value,
                "strength": op.config.strength,
                "count": len(ds),
            }
        },
    )
    return LabeledDataset(out, ds.labels, ds.num_classes)
