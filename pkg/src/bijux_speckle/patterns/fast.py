"""Implicit permuted-Hadamard acquisition through the fast transform.

Fields whose Hadamard order exceeds the dense limit (a 1000x1000 scene
needs order 2^20) are measured without ever forming a pattern: with the
active pixels ``x`` scattered into ``y[columns] = x`` the binary pattern of
row ``r`` sums to ``(sum(x) + fwht(y)[r]) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import FAST_HADAMARD_MAX_ORDER_LOG2
from bijux_speckle.errors import DimensionMismatchError

from .hadamard import fwht
from .mask import FovMask
from .pattern_set import HadamardPlan, plan_hadamard


@dataclass(frozen=True, eq=False)
class HadamardSampler:
    """The same pattern set as ``build_hadamard_patterns``, kept implicit."""

    mask: FovMask
    sampling_rate: float
    seed: int
    plan: HadamardPlan

    @classmethod
    def create(cls, mask: FovMask, sampling_rate: float, seed: int) -> HadamardSampler:
        plan = plan_hadamard(
            mask, sampling_rate, seed, order_limit=FAST_HADAMARD_MAX_ORDER_LOG2
        )
        return cls(mask, sampling_rate, seed, plan)

    @property
    def m(self) -> int:
        return int(self.plan.rows.size)

    @property
    def n_active(self) -> int:
        return self.mask.n_active

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "hadamard_permuted",
            "m": self.m,
            "n_active": self.n_active,
            "sampling_rate": self.sampling_rate,
            "seed": self.seed,
            "mask": self.mask.describe(),
            "hadamard_order_log2": self.plan.order_log2,
        }


def measure_hadamard_fast(
    sampler: HadamardSampler, array: NDArray[np.floating]
) -> NDArray[np.float64]:
    """Mean-normalized measurement vector of one image (or a stack of images)."""
    values = np.asarray(array, dtype=np.float64)
    if values.shape[-2:] != (sampler.mask.height, sampler.mask.width):
        raise DimensionMismatchError(
            f"sampler field is {sampler.mask.width}x{sampler.mask.height}, "
            f"image is {values.shape[-1]}x{values.shape[-2]}"
        )
    lead = values.shape[:-2]
    active = values.reshape(*lead, -1)[..., sampler.mask.active_indices]
    scattered = np.zeros((*lead, 1 << sampler.plan.order_log2), dtype=np.float64)
    scattered[..., sampler.plan.columns] = active
    spectrum = fwht(scattered)[..., sampler.plan.rows]
    total = active.sum(axis=-1, keepdims=True)
    return (total + spectrum) / (2.0 * sampler.n_active)
