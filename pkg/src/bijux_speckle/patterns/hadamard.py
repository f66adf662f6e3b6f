"""Sylvester Hadamard matrices, selected rows and the fast transform."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import FAST_HADAMARD_MAX_ORDER_LOG2, HADAMARD_MAX_ORDER_LOG2
from bijux_speckle.errors import OrderTooLargeError, ParamOutOfRangeError


def check_order(order_log2: int, limit: int) -> None:
    if order_log2 < 1:
        raise ParamOutOfRangeError(f"Hadamard order_log2 must be >= 1, got {order_log2}")
    if order_log2 > limit:
        raise OrderTooLargeError(order_log2, limit)


def hadamard_matrix(order_log2: int) -> NDArray[np.int8]:
    """Unnormalized ``2^n x 2^n`` matrix of +-1 from ``H_n = H_1 (x) H_{n-1}``."""
    check_order(order_log2, HADAMARD_MAX_ORDER_LOG2)
    base = np.array([[1, 1], [1, -1]], dtype=np.int8)
    matrix = base
    for _ in range(order_log2 - 1):
        matrix = np.kron(base, matrix)
    return matrix


def _parity(values: NDArray[np.int64]) -> NDArray[np.int64]:
    folded = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        folded ^= folded >> shift
    return folded & 1


def hadamard_rows(
    order_log2: int, rows: NDArray[np.integer] | list[int]
) -> NDArray[np.int8]:
    """Selected rows of the Sylvester matrix without building the whole matrix.

    Entry ``(i, j)`` is ``(-1) ** popcount(i & j)``.
    """
    check_order(order_log2, FAST_HADAMARD_MAX_ORDER_LOG2)
    size = 1 << order_log2
    selected = np.asarray(rows, dtype=np.int64).reshape(-1)
    if selected.size and (selected.min() < 0 or selected.max() >= size):
        raise ParamOutOfRangeError(f"row index outside [0, {size})")
    columns = np.arange(size, dtype=np.int64)
    signs = 1 - 2 * _parity(selected[:, None] & columns[None, :])
    return signs.astype(np.int8)


def fwht(values: NDArray[np.floating]) -> NDArray[np.float64]:
    """Unnormalized Walsh-Hadamard transform along the last axis (Sylvester order).

    ``fwht(x)[..., k] == sum_j H[k, j] * x[..., j]``.
    """
    data = np.array(values, dtype=np.float64, copy=True)
    size = data.shape[-1]
    if size == 0 or size & (size - 1):
        raise ParamOutOfRangeError(f"transform length must be a power of two, got {size}")
    lead = data.shape[:-1]
    half = 1
    while half < size:
        blocks = data.reshape(*lead, size // (2 * half), 2, half)
        top = blocks[..., 0, :]
        bottom = blocks[..., 1, :]
        data = np.stack((top + bottom, top - bottom), axis=-2).reshape(*lead, size)
        half *= 2
    return data
