"""Surrogate point-spread functions and band transfer matrices.

Kernels live on the full image grid in wrap-around coordinates: entry
``[0, 0]`` is zero displacement and ``[-1, 0]`` is one pixel up. Every draw
comes from a stream keyed by family and grid size but not by strength, so
a stronger medium extends the draws of a weaker one instead of replacing them.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray
from scipy import fft, sparse

from bijux_speckle.utilities.numeric import round_half_up
from bijux_speckle.utilities.rng import SplitMix64

SCATNET_MAX_BLOBS = 64
BLOB_SIGMA = 1.5


def signed_offsets(size: int) -> NDArray[np.float64]:
    """Displacement represented by each index of a wrap-around axis."""
    return fft.fftfreq(size) * size


def _squared_distance(height: int, width: int) -> NDArray[np.float64]:
    dy = signed_offsets(height)[:, None]
    dx = signed_offsets(width)[None, :]
    return dy * dy + dx * dx


def delta_kernel(height: int, width: int) -> NDArray[np.float64]:
    kernel = np.zeros((height, width), dtype=np.float64)
    kernel[0, 0] = 1.0
    return kernel


def support_radius(strength: float, max_radius: int) -> int:
    return max(1, round_half_up(strength * max_radius))


def monte_like_kernel(
    stream: SplitMix64, height: int, width: int, strength: float, max_radius: int
) -> NDArray[np.float64]:
    """Speckle PSF: |IFFT(random phase x circular pupil)|^2 windowed to radius r."""
    radius = support_radius(strength, max_radius)
    dist2 = _squared_distance(height, width)
    pupil = dist2 <= radius * radius
    phase = 2.0 * np.pi * stream.uniform(height * width).reshape(height, width)
    field = fft.ifft2(pupil * np.exp(1j * phase))
    psf = np.abs(field) ** 2
    psf[dist2 > radius * radius] = 0.0
    return psf / psf.sum()


def scatnet_like_kernel(
    stream: SplitMix64, height: int, width: int, strength: float, max_radius: int
) -> NDArray[np.float64]:
    """Sum of equal Gaussian blobs at nested random offsets inside the max radius."""
    count = max(1, round_half_up(strength * SCATNET_MAX_BLOBS))
    # All 64 offsets are drawn every time; strength selects a prefix and scales them.
    radii = np.sqrt(stream.uniform(SCATNET_MAX_BLOBS))
    angles = 2.0 * np.pi * stream.uniform(SCATNET_MAX_BLOBS)
    reach = strength * max_radius
    centers_y = reach * radii[:count] * np.sin(angles[:count])
    centers_x = reach * radii[:count] * np.cos(angles[:count])
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]
    kernel = np.zeros((height, width), dtype=np.float64)
    for cy, cx in zip(centers_y, centers_x, strict=True):
        dy = np.mod(rows - cy + height / 2.0, height) - height / 2.0
        dx = np.mod(cols - cx + width / 2.0, width) - width / 2.0
        kernel += np.exp(-(dy * dy + dx * dx) / (2.0 * BLOB_SIGMA**2))
    return kernel / kernel.sum()


def band_transfer_matrix(
    stream: SplitMix64, size: int, strength: float
) -> sparse.csr_matrix:
    """Row-normalized nonnegative band matrix of half-width round(s * N / 4)."""
    half_width = round_half_up(strength * size / 4.0)
    rows = np.arange(size, dtype=np.int64)
    starts = np.maximum(0, rows - half_width)
    stops = np.minimum(size, rows + half_width + 1)
    lengths = stops - starts
    indptr = np.concatenate(([0], np.cumsum(lengths)))
    nnz = int(indptr[-1])
    position = np.arange(nnz, dtype=np.int64) - np.repeat(indptr[:-1], lengths)
    indices = np.repeat(starts, lengths) + position
    # Values in (0, 1] keep every row sum strictly positive.
    values = 1.0 - stream.uniform(nnz)
    row_sums = np.add.reduceat(values, indptr[:-1])
    values /= np.repeat(row_sums, lengths)
    return sparse.csr_matrix((values, indices, indptr), shape=(size, size))
