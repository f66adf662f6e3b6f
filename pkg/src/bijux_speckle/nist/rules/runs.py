"""Runs and longest run of ones."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import NDArray
from scipy.special import erfc, gammaincc

from bijux_speckle.enums import RandomnessTest

from .types import Bits, TestResult, require_length, result

RUNS_MIN_BITS = 10
LONGEST_RUN_MIN_BITS = 128

# (block size, class lower edge, class count, class probabilities)
_LONGEST_RUN_TABLES = (
    (6272, 8, 1, (0.2148, 0.3672, 0.2305, 0.1875)),
    (750000, 128, 4, (0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124)),
    (None, 10000, 10, (0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727)),
)


def runs(bits: Bits) -> TestResult:
    test = RandomnessTest.RUNS
    n = require_length(test, bits, RUNS_MIN_BITS)
    pi = float(bits.mean())
    tau = 2.0 / math.sqrt(n)
    if abs(pi - 0.5) >= tau:
        # The frequency prerequisite fails, so the statistic is not computed.
        return result(test, 0.0, n=n, proportion=pi, prerequisite_failed=True)
    changes = int(np.count_nonzero(bits[1:] != bits[:-1]))
    v_obs = changes + 1
    numerator = abs(v_obs - 2.0 * n * pi * (1.0 - pi))
    denominator = 2.0 * math.sqrt(2.0 * n) * pi * (1.0 - pi)
    return result(test, erfc(numerator / denominator), n=n, runs=v_obs, proportion=pi)


def longest_runs(blocks: NDArray[np.uint8]) -> NDArray[np.int64]:
    """Longest run of ones in each row."""
    current = np.zeros(blocks.shape[0], dtype=np.int64)
    longest = np.zeros(blocks.shape[0], dtype=np.int64)
    for column in blocks.T:
        current = np.where(column == 1, current + 1, 0)
        np.maximum(longest, current, out=longest)
    return longest


def longest_run(bits: Bits) -> TestResult:
    test = RandomnessTest.LONGEST_RUN
    n = require_length(test, bits, LONGEST_RUN_MIN_BITS)
    for limit, size, lowest, probabilities in _LONGEST_RUN_TABLES:
        if limit is None or n < limit:
            break
    classes = len(probabilities)
    blocks = n // size
    lengths = longest_runs(bits[: blocks * size].reshape(blocks, size))
    bins = np.clip(lengths - lowest, 0, classes - 1)
    counts = np.bincount(bins, minlength=classes)
    expected = blocks * np.asarray(probabilities)
    chi2 = float(np.sum((counts - expected) ** 2 / expected))
    return result(
        test,
        gammaincc((classes - 1) / 2.0, chi2 / 2.0),
        n=n,
        block_size=size,
        blocks=blocks,
        counts=counts.tolist(),
        chi2=chi2,
    )
