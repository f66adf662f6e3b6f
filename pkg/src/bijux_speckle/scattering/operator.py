"""Scatter operators built from a ScatterConfig for a given image size."""

from __future__ import annotations

from dataclasses import dataclass
import logging

import numpy as np
from numpy.typing import NDArray
from scipy import sparse

from bijux_speckle.constants import SURROGATE_MODEL_VERSION
from bijux_speckle.enums import ScatterFamily
from bijux_speckle.errors import ZeroDimensionError
from bijux_speckle.utilities.rng import SplitMix64

from .config import ScatterConfig
from .kernels import (
    band_transfer_matrix,
    delta_kernel,
    monte_like_kernel,
    scatnet_like_kernel,
    support_radius,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScatterOperator:
    """A built medium: a normalized kernel, or a transfer matrix for that family."""

    config: ScatterConfig
    width: int
    height: int
    kernel: NDArray[np.float64] | None = None
    matrix: sparse.csr_matrix | None = None

    @property
    def family(self) -> ScatterFamily:
        return self.config.family

    @property
    def is_identity(self) -> bool:
        return self.config.is_identity

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    @property
    def support_radius(self) -> int:
        """Radius of the kernel support (0 for the identity)."""
        if self.is_identity:
            return 0
        return support_radius(self.config.strength, self.config.max_radius(self.width))

    def dense(self) -> NDArray[np.float64]:
        """Kernel array, or the transfer matrix as a dense array."""
        if self.matrix is not None:
            return np.asarray(self.matrix.toarray(), dtype=np.float64)
        assert self.kernel is not None
        return self.kernel


def operator_stream(cfg: ScatterConfig, width: int, height: int) -> SplitMix64:
    return SplitMix64(cfg.seed).spawn(
        "scatter", SURROGATE_MODEL_VERSION, cfg.family.value, height, width
    )


def build_operator(cfg: ScatterConfig, width: int, height: int) -> ScatterOperator:
    """Deterministic operator for ``(cfg, width, height)``."""
    if width <= 0 or height <= 0:
        raise ZeroDimensionError(f"operator size must be positive, got {width}x{height}")
    stream = operator_stream(cfg, width, height)
    max_radius = cfg.max_radius(width)
    if cfg.family is ScatterFamily.TRANSFER_MATRIX:
        size = width * height
        if cfg.is_identity:
            matrix = sparse.identity(size, dtype=np.float64, format="csr")
        else:
            matrix = band_transfer_matrix(stream, size, cfg.strength)
        op = ScatterOperator(cfg, width, height, matrix=matrix)
    else:
        if cfg.is_identity:
            kernel = delta_kernel(height, width)
        elif cfg.family is ScatterFamily.MONTE_LIKE:
            kernel = monte_like_kernel(stream, height, width, cfg.strength, max_radius)
        else:
            kernel = scatnet_like_kernel(stream, height, width, cfg.strength, max_radius)
        kernel.setflags(write=False)
        op = ScatterOperator(cfg, width, height, kernel=kernel)
    logger.debug(
        "Built scatter operator",
        extra={
            "context": {
                "family": cfg.family.value,
                "strength": cfg.strength,
                "seed": cfg.seed,
                "width": width,
                "height": height,
                "support_radius": op.support_radius,
            }
        },
    )
    return op
