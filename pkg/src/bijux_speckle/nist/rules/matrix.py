"""Binary matrix rank over GF(2)."""

from __future__ import annotations

import math

import numpy as np

from bijux_speckle.enums import RandomnessTest

from .types import Bits, TestResult, require_length, result

MATRIX_ROWS = 32
MATRIX_COLS = 32
RANK_MIN_BITS = 38912


def gf2_rank(rows: list[int], width: int) -> int:
    """Rank of a binary matrix whose rows are packed into integers."""
    pivots = list(rows)
    rank = 0
    for bit in reversed(range(width)):
        mask = 1 << bit
        pivot = next((i for i in range(rank, len(pivots)) if pivots[i] & mask), None)
        if pivot is None:
            continue
        pivots[rank], pivots[pivot] = pivots[pivot], pivots[rank]
        for i in range(len(pivots)):
            if i != rank and pivots[i] & mask:
                pivots[i] ^= pivots[rank]
        rank += 1
    return rank


def rank_probability(rank: int, rows: int, cols: int) -> float:
    """Probability that a random ``rows x cols`` binary matrix has ``rank``."""
    exponent = rank * (rows + cols - rank) - rows * cols
    product = 1.0
    for i in range(rank):
        product *= (1.0 - 2.0 ** (i - rows)) * (1.0 - 2.0 ** (i - cols)) / (
            1.0 - 2.0 ** (i - rank)
        )
    return 2.0**exponent * product


def rank_p_value(
    full: int, minus_one: int, count: int, rows: int = MATRIX_ROWS, cols: int = MATRIX_COLS
) -> tuple[float, float]:
    """``(p, chi2)`` from how many of ``count`` matrices had full rank or one less."""
    p_full = rank_probability(min(rows, cols), rows, cols)
    p_minus_one = rank_probability(min(rows, cols) - 1, rows, cols)
    p_rest = 1.0 - p_full - p_minus_one
    rest = count - full - minus_one
    chi2 = (
        (full - p_full * count) ** 2 / (p_full * count)
        + (minus_one - p_minus_one * count) ** 2 / (p_minus_one * count)
        + (rest - p_rest * count) ** 2 / (p_rest * count)
    )
    return math.exp(-chi2 / 2.0), chi2


def binary_matrix_rank(bits: Bits) -> TestResult:
    test = RandomnessTest.RANK
    n = require_length(test, bits, RANK_MIN_BITS)
    size = MATRIX_ROWS * MATRIX_COLS
    count = n // size
    words = np.packbits(
        bits[: count * size].reshape(count * MATRIX_ROWS, MATRIX_COLS), axis=1
    )
    packed = words.view(">u4").reshape(count, MATRIX_ROWS)
    ranks = np.array(
        [gf2_rank([int(row) for row in matrix], MATRIX_COLS) for matrix in packed]
    )
    full = int(np.count_nonzero(ranks == MATRIX_ROWS))
    minus_one = int(np.count_nonzero(ranks == MATRIX_ROWS - 1))
    p_value, chi2 = rank_p_value(full, minus_one, count)
    return result(
        test,
        p_value,
        n=n,
        matrices=count,
        full_rank=full,
        rank_minus_one=minus_one,
        chi2=chi2,
    )
