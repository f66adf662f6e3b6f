"""Pattern sets: permuted Hadamard patterns and learned real-valued patterns."""

from __future__ import annotations

from dataclasses import dataclass
import logging
import math
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy import fft

from bijux_speckle.constants import HADAMARD_MAX_ORDER_LOG2
from bijux_speckle.enums import MaskStrategy, PatternKind
from bijux_speckle.errors import (
    MaskEmptyError,
    ParamOutOfRangeError,
    ShapeMismatchError,
)
from bijux_speckle.scattering.operator import ScatterOperator
from bijux_speckle.utilities.hashing import array_hash
from bijux_speckle.utilities.numeric import round_half_up
from bijux_speckle.utilities.rng import SplitMix64

from .hadamard import check_order, hadamard_rows
from .mask import FovMask, make_mask

logger = logging.getLogger(__name__)

MIN_ACTIVE_PIXELS = 4


@dataclass(frozen=True, eq=False)
class PatternSet:
    """Ordered modulation patterns restricted to a mask's active pixels.

    ``matrix`` holds one row per pattern over the active pixels in row-major
    order; ``patterns`` expands them to full-field frames that are zero
    outside the mask.
    """

    matrix: NDArray[np.float64]
    mask: FovMask
    seed: int
    kind: PatternKind
    sampling_rate: float
    hadamard_order_log2: int | None = None
    hadamard_row_indices: NDArray[np.int64] | None = None
    column_permutation: NDArray[np.int64] | None = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[1] != self.mask.n_active:
            raise ShapeMismatchError(
                f"pattern matrix {matrix.shape} does not match "
                f"{self.mask.n_active} active pixels"
            )
        if not 1 <= matrix.shape[0] <= self.mask.n_active:
            raise ParamOutOfRangeError(
                f"pattern count {matrix.shape[0]} outside [1, {self.mask.n_active}]"
            )
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n_active(self) -> int:
        return self.mask.n_active

    @property
    def width(self) -> int:
        return self.mask.width

    @property
    def height(self) -> int:
        return self.mask.height

    def __len__(self) -> int:
        return self.m

    @property
    def patterns(self) -> NDArray[np.float64]:
        """Full-field ``(m, height, width)`` stack."""
        frames = np.zeros((self.m, self.height * self.width), dtype=np.float64)
        frames[:, self.mask.active_indices] = self.matrix
        return frames.reshape(self.m, self.height, self.width)

    def pattern(self, index: int) -> NDArray[np.float64]:
        frame = np.zeros(self.height * self.width, dtype=np.float64)
        frame[self.mask.active_indices] = self.matrix[index]
        return frame.reshape(self.height, self.width)

    def describe(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "m": self.m,
            "n_active": self.n_active,
            "sampling_rate": self.sampling_rate,
            "seed": self.seed,
            "mask": self.mask.describe(),
            "hadamard_order_log2": self.hadamard_order_log2,
            "sha256": array_hash(self.matrix),
        }


def pattern_count(sampling_rate: float, n_active: int) -> int:
    """``max(1, round(rate * N_active))`` with ties rounded up."""
    if not 0.0 < sampling_rate <= 1.0:
        raise ParamOutOfRangeError(
            f"sampling rate must lie in (0, 1], got {sampling_rate}"
        )
    return max(1, min(n_active, round_half_up(sampling_rate * n_active)))


@dataclass(frozen=True)
class HadamardPlan:
    """Row choice and column permutation defining a permuted Hadamard set."""

    order_log2: int
    rows: NDArray[np.int64]
    columns: NDArray[np.int64]


def plan_hadamard(
    mask: FovMask, sampling_rate: float, seed: int, *, order_limit: int
) -> HadamardPlan:
    n_active = mask.n_active
    if n_active < MIN_ACTIVE_PIXELS:
        raise MaskEmptyError(
            f"mask has {n_active} active pixels, at least {MIN_ACTIVE_PIXELS} needed"
        )
    count = pattern_count(sampling_rate, n_active)
    order_log2 = max(1, math.ceil(math.log2(n_active)))
    check_order(order_log2, order_limit)
    size = 1 << order_log2
    stream = SplitMix64(seed).spawn("patterns", "hadamard", order_log2)
    # Row 0 (all ones) always leads; the remaining rows are drawn without it.
    others = 1 + stream.spawn("rows").permutation(size - 1)
    rows = np.concatenate(([0], others[: count - 1])).astype(np.int64)
    columns = stream.spawn("columns").permutation(size)[:n_active]
    return HadamardPlan(order_log2, rows, columns)


def build_hadamard_patterns(
    field_w: int,
    field_h: int,
    mask: FovMask,
    sampling_rate: float,
    seed: int,
) -> PatternSet:
    """Seeded row/column-permuted Hadamard patterns mapped to {0, 1}."""
    if (mask.width, mask.height) != (field_w, field_h):
        raise ShapeMismatchError(
            f"mask is {mask.width}x{mask.height}, field is {field_w}x{field_h}"
        )
    plan = plan_hadamard(
        mask, sampling_rate, seed, order_limit=HADAMARD_MAX_ORDER_LOG2
    )
    signs = hadamard_rows(plan.order_log2, plan.rows)[:, plan.columns]
    matrix = (signs > 0).astype(np.float64)
    pattern_set = PatternSet(
        matrix=matrix,
        mask=mask,
        seed=seed,
        kind=PatternKind.HADAMARD_PERMUTED,
        sampling_rate=sampling_rate,
        hadamard_order_log2=plan.order_log2,
        hadamard_row_indices=plan.rows,
        column_permutation=plan.columns,
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            "Built Hadamard pattern set",
            extra={"context": pattern_set.describe()},
        )
    return pattern_set


def learned_pattern_set(
    patterns: NDArray[np.floating], mask: FovMask, seed: int
) -> PatternSet:
    """Wrap real-valued patterns given as ``(m, N_active)`` or full-field frames."""
    values = np.asarray(patterns, dtype=np.float64)
    if values.ndim == 3:
        if values.shape[1:] != (mask.height, mask.width):
            raise ShapeMismatchError(
                f"frames {values.shape[1:]} do not match mask "
                f"{mask.height}x{mask.width}"
            )
        if np.any(values.reshape(values.shape[0], -1)[:, ~mask.active.reshape(-1)]):
            raise ShapeMismatchError("learned patterns are nonzero outside the mask")
        values = values.reshape(values.shape[0], -1)[:, mask.active_indices]
    if not np.all(np.isfinite(values)):
        raise ParamOutOfRangeError("learned patterns must be finite")
    return PatternSet(
        matrix=values,
        mask=mask,
        seed=seed,
        kind=PatternKind.LEARNED,
        sampling_rate=values.shape[0] / mask.n_active,
    )


def quantize_patterns(ps: PatternSet, decimals: int) -> PatternSet:
    """Keep ``decimals`` decimal places of every pattern value (ties up)."""
    if decimals < 0:
        raise ParamOutOfRangeError(f"decimals must be >= 0, got {decimals}")
    scale = 10.0**decimals
    rounded = round_half_up(ps.matrix * scale) / scale
    return PatternSet(
        matrix=rounded,
        mask=ps.mask,
        seed=ps.seed,
        kind=ps.kind,
        sampling_rate=ps.sampling_rate,
        hadamard_order_log2=ps.hadamard_order_log2,
        hadamard_row_indices=ps.hadamard_row_indices,
        column_permutation=ps.column_permutation,
    )


def fold_transfer_matrix(ps: PatternSet, op: ScatterOperator) -> PatternSet:
    """Absorb a scatter operator into the patterns.

    The result is a full-field real pattern set with
    ``measure_array(x, folded) == measure_array(convolve(op, x), ps)``.
    """
    if op.shape != (ps.height, ps.width):
        raise ShapeMismatchError(
            f"operator is {op.width}x{op.height}, patterns are {ps.width}x{ps.height}"
        )
    frames = ps.patterns.reshape(ps.m, -1)
    if op.is_identity:
        folded = frames
    elif op.matrix is not None:
        folded = np.asarray((op.matrix.T @ frames.T).T, dtype=np.float64)
    else:
        # Adjoint of circular convolution is circular correlation.
        spectrum = np.conj(fft.rfft2(op.kernel))
        folded = fft.irfft2(
            fft.rfft2(ps.patterns, axes=(-2, -1)) * spectrum,
            s=op.shape,
            axes=(-2, -1),
        ).reshape(ps.m, -1)
    full = make_mask(MaskStrategy.FULL, ps.width, ps.height)
    # Measurements divide by N_active, which grows from the mask to the field.
    folded = folded * (full.n_active / ps.n_active)
    return PatternSet(
        matrix=folded,
        mask=full,
        seed=ps.seed,
        kind=PatternKind.LEARNED,
        sampling_rate=ps.m / full.n_active,
    )


def modulator_patterns(
    ps: PatternSet, op: ScatterOperator, decimals: int
) -> PatternSet:
    """Gray patterns a modulator would project in place of the scattering medium.

    The operator is folded into ``ps``, the result is scaled to a peak of 1
    and every value keeps ``decimals`` decimal places. Measurements of the
    plain image are then proportional to ``fold_transfer_matrix`` ones up to
    the rounding.
    """
    folded = fold_transfer_matrix(ps, op)
    peak = float(np.max(folded.matrix, initial=0.0))
    gray = PatternSet(
        matrix=folded.matrix / peak if peak > 0.0 else folded.matrix,
        mask=folded.mask,
        seed=folded.seed,
        kind=folded.kind,
        sampling_rate=folded.sampling_rate,
    )
    return quantize_patterns(gray, decimals)
