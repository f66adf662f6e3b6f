"""Rounding shared by every integer-producing stage."""

from __future__ import annotations

from typing import overload

import numpy as np
from numpy.typing import NDArray


@overload
def round_half_up(value: float) -> int: ...


@overload
def round_half_up(value: NDArray[np.floating]) -> NDArray[np.int64]: ...


def round_half_up(
    value: float | NDArray[np.floating],
) -> int | NDArray[np.int64]:
    """Round to nearest with ties going up (``round(2.5) == 3``)."""
    if isinstance(value, np.ndarray):
        return np.floor(value + 0.5).astype(np.int64)
    return int(np.floor(float(value) + 0.5))
