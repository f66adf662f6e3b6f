"""Linear complexity via Berlekamp-Massey on fixed-size blocks."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaincc

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import BadParamsError

from .types import Bits, TestResult, require_length, result

LINEAR_COMPLEXITY_BLOCK = 500
LINEAR_COMPLEXITY_MIN_BITS = 1_000_000
COMPLEXITY_PROBABILITIES = (0.010417, 0.03125, 0.125, 0.5, 0.25, 0.0625, 0.020833)


def berlekamp_massey(bits: Bits | list[int]) -> int:
    """Length of the shortest LFSR generating ``bits`` over GF(2).

    Polynomials are packed into Python integers; ``window`` holds the bits
    seen so far in reverse so the discrepancy is one AND and a parity.
    """
    connection = 1
    previous = 1
    complexity = 0
    last_change = -1
    window = 0
    for index, bit in enumerate(int(b) for b in bits):
        window = (window << 1) | bit
        discrepancy = (connection & window).bit_count() & 1
        if not discrepancy:
            continue
        updated = connection ^ (previous << (index - last_change))
        if 2 * complexity <= index:
            previous = connection
            complexity = index + 1 - complexity
            last_change = index
        connection = updated
    return complexity


def complexity_p_value(
    counts: Sequence[int] | NDArray[np.int64],
    probabilities: Sequence[float] = COMPLEXITY_PROBABILITIES,
) -> tuple[float, float]:
    """``(p, chi2)`` for the seven T-statistic classes."""
    observed = np.asarray(counts, dtype=np.float64)
    if observed.size != len(probabilities):
        raise BadParamsError(
            f"expected {len(probabilities)} class counts, got {observed.size}"
        )
    expected = observed.sum() * np.asarray(probabilities, dtype=np.float64)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return float(gammaincc((observed.size - 1) / 2.0, chi2 / 2.0)), chi2


def linear_complexity(bits: Bits, block_size: int = LINEAR_COMPLEXITY_BLOCK) -> TestResult:
    test = RandomnessTest.LINEAR_COMPLEXITY
    if block_size < 1:
        raise BadParamsError(f"{test.value} block size must be positive")
    n = require_length(test, bits, LINEAR_COMPLEXITY_MIN_BITS)
    blocks = n // block_size
    data = bits[: blocks * block_size].reshape(blocks, block_size)
    complexities = np.array([berlekamp_massey(row.tolist()) for row in data])
    sign = -1.0 if block_size % 2 else 1.0
    mean = (
        block_size / 2.0
        + (9.0 + (-1.0) ** (block_size + 1)) / 36.0
        - (block_size / 3.0 + 2.0 / 9.0) / 2.0**block_size
    )
    t = sign * (complexities - mean) + 2.0 / 9.0
    edges = np.array([-2.5, -1.5, -0.5, 0.5, 1.5, 2.5])
    classes = np.searchsorted(edges, t, side="left")
    counts = np.bincount(classes, minlength=len(COMPLEXITY_PROBABILITIES))
    p_value, chi2 = complexity_p_value(counts)
    return result(
        test,
        p_value,
        n=n,
        block_size=block_size,
        blocks=blocks,
        counts=counts.tolist(),
        chi2=chi2,
    )
