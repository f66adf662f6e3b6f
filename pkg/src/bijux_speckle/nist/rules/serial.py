"""Approximate entropy and serial tests over overlapping m-bit patterns."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaincc

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import BadParamsError

from .types import Bits, TestResult, require_length, result, window_values

APEN_DEFAULT_M = 10
SERIAL_DEFAULT_M = 5
SERIAL_FALLBACK_M = 2


def pattern_counts(bits: Bits, m: int) -> np.ndarray:
    """Cyclic counts of every m-bit pattern (``m == 0`` counts nothing)."""
    if m <= 0:
        return np.zeros(0, dtype=np.int64)
    return np.bincount(window_values(bits, m, cyclic=True), minlength=1 << m)


def _phi(bits: Bits, m: int) -> float:
    counts = pattern_counts(bits, m)
    if counts.size == 0:
        return 0.0
    proportions = counts[counts > 0] / bits.size
    return float(np.sum(proportions * np.log(proportions)))


def approximate_entropy(bits: Bits, m: int | None = None) -> TestResult:
    test = RandomnessTest.APPROXIMATE_ENTROPY
    n = require_length(test, bits, 10)
    if m is None:
        m = min(APEN_DEFAULT_M, max(1, int(math.floor(math.log2(n))) - 6))
    if m < 1:
        raise BadParamsError(f"{test.value} block length must be >= 1, got {m}")
    apen = _phi(bits, m) - _phi(bits, m + 1)
    chi2 = 2.0 * n * (math.log(2.0) - apen)
    return result(
        test, gammaincc(2.0 ** (m - 1), chi2 / 2.0), n=n, m=m, apen=apen, chi2=chi2
    )


def _psi_squared(bits: Bits, m: int) -> float:
    if m <= 0:
        return 0.0
    counts = pattern_counts(bits, m).astype(np.float64)
    return float((2.0**m / bits.size) * np.sum(counts * counts) - bits.size)


def serial(bits: Bits, m: int | None = None) -> TestResult:
    """Two p-values from the first and second differences of psi-squared."""
    test = RandomnessTest.SERIAL
    n = require_length(test, bits, 10)
    if m is None:
        limit = int(math.floor(math.log2(n))) - 2
        m = SERIAL_DEFAULT_M if SERIAL_DEFAULT_M < limit else SERIAL_FALLBACK_M
    if m < 2:
        raise BadParamsError(f"{test.value} block length must be >= 2, got {m}")
    psi_m = _psi_squared(bits, m)
    psi_m1 = _psi_squared(bits, m - 1)
    psi_m2 = _psi_squared(bits, m - 2)
    delta1 = psi_m - psi_m1
    delta2 = psi_m - 2.0 * psi_m1 + psi_m2
    return result(
        test,
        gammaincc(2.0 ** (m - 2), delta1 / 2.0),
        gammaincc(2.0 ** (m - 3), delta2 / 2.0),
        n=n,
        m=m,
        delta1=delta1,
        delta2=delta2,
    )
