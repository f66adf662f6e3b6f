"""Regional field-of-view masks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.enums import MaskStrategy
from bijux_speckle.errors import ParamOutOfRangeError, ZeroDimensionError


@dataclass(frozen=True)
class FovMask:
    """Which pixels of a ``width x height`` field are modulated.

    ``param`` is the square width for ``A_central`` and the number of
    selected rows and columns for ``B_interleaved``; ``full`` ignores it.
    """

    strategy: MaskStrategy
    width: int
    height: int
    param: int | None = None
    active: NDArray[np.bool_] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ZeroDimensionError(
                f"mask field must be positive, got {self.width}x{self.height}"
            )
        active = _active_pixels(self.strategy, self.width, self.height, self.param)
        active.setflags(write=False)
        object.__setattr__(self, "active", active)

    @property
    def n_active(self) -> int:
        return int(self.active.sum())

    @property
    def active_indices(self) -> NDArray[np.int64]:
        """Row-major flat indices of the active pixels."""
        return np.flatnonzero(self.active).astype(np.int64)

    def describe(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy.value,
            "width": self.width,
            "height": self.height,
            "param": self.param,
            "n_active": self.n_active,
        }


def _check_param(strategy: MaskStrategy, param: int | None, limit: int) -> int:
    if param is None or not 1 <= param <= limit:
        raise ParamOutOfRangeError(
            f"{strategy.value} parameter must lie in [1, {limit}], got {param}"
        )
    return param


def _active_pixels(
    strategy: MaskStrategy, width: int, height: int, param: int | None
) -> NDArray[np.bool_]:
    active = np.zeros((height, width), dtype=bool)
    limit = min(width, height)
    if strategy is MaskStrategy.FULL:
        active[:, :] = True
    elif strategy is MaskStrategy.A_CENTRAL:
        side = _check_param(strategy, param, limit)
        top = (height - side) // 2
        left = (width - side) // 2
        active[top : top + side, left : left + side] = True
    else:
        count = _check_param(strategy, param, limit)
        rows = (np.arange(count) * height) // count
        cols = (np.arange(count) * width) // count
        # A pixel is active only where a selected row meets a selected column.
        active[np.ix_(rows, cols)] = True
    return active


def make_mask(
    strategy: MaskStrategy | str, width: int, height: int, param: int | None = None
) -> FovMask:
    chosen = MaskStrategy(strategy)
    if chosen is MaskStrategy.FULL:
        param = None
    return FovMask(chosen, width, height, param)
