"""Frequency, block frequency and cumulative sums."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc, gammaincc
from scipy.stats import norm

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import BadParamsError

from .types import Bits, TestResult, plus_minus, require_length, result

FREQUENCY_MIN_BITS = 10
CUSUM_MIN_BITS = 10


def frequency(bits: Bits) -> TestResult:
    n = require_length(RandomnessTest.FREQUENCY, bits, FREQUENCY_MIN_BITS)
    total = int(plus_minus(bits).sum())
    s_obs = abs(total) / math.sqrt(n)
    return result(
        RandomnessTest.FREQUENCY, erfc(s_obs / math.sqrt(2.0)), n=n, sum=total
    )


def default_block_size(n: int) -> int:
    return 128 if n >= 12800 else max(20, n // 100 + 1)


def block_frequency(bits: Bits, block_size: int | None = None) -> TestResult:
    test = RandomnessTest.BLOCK_FREQUENCY
    size = default_block_size(bits.size) if block_size is None else block_size
    if size < 1:
        raise BadParamsError(f"{test.value} block size must be positive, got {size}")
    n = require_length(test, bits, size)
    blocks = n // size
    proportions = bits[: blocks * size].reshape(blocks, size).mean(axis=1)
    chi2 = 4.0 * size * float(np.sum((proportions - 0.5) ** 2))
    return result(
        test,
        gammaincc(blocks / 2.0, chi2 / 2.0),
        n=n,
        block_size=size,
        blocks=blocks,
        chi2=chi2,
    )


def _trunc_div(numerator: int, denominator: int) -> int:
    # Integer division rounding toward zero.
    quotient = abs(numerator) // abs(denominator)
    return quotient if (numerator >= 0) == (denominator >= 0) else -quotient


def cusum_p_value(n: int, z: int) -> float:
    root = math.sqrt(n)
    ratio = _trunc_div(n, z)
    first = np.arange(_trunc_div(-ratio + 1, 4), _trunc_div(ratio - 1, 4) + 1)
    second = np.arange(_trunc_div(-ratio - 3, 4), _trunc_div(ratio - 1, 4) + 1)
    sum1 = np.sum(norm.cdf((4 * first + 1) * z / root) - norm.cdf((4 * first - 1) * z / root))
    sum2 = np.sum(norm.cdf((4 * second + 3) * z / root) - norm.cdf((4 * second + 1) * z / root))
    return float(1.0 - sum1 + sum2)


def cumulative_sums(bits: Bits) -> TestResult:
    """Forward and backward random-walk excursions (two p-values)."""
    test = RandomnessTest.CUMULATIVE_SUMS
    n = require_length(test, bits, CUSUM_MIN_BITS)
    steps = plus_minus(bits)
    forward = int(np.max(np.abs(np.cumsum(steps))))
    backward = int(np.max(np.abs(np.cumsum(steps[::-1]))))
    return result(
        test,
        cusum_p_value(n, forward),
        cusum_p_value(n, backward),
        n=n,
        forward_max=forward,
        backward_max=backward,
    )
