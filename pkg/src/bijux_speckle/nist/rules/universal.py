"""Maurer's universal statistical test."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import erfc

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import BadParamsError

from .types import Bits, TestResult, require_length, result, window_values

UNIVERSAL_MIN_BITS = 387840

# Expected value and variance of log2 distances for block lengths 1..16.
UNIVERSAL_MOMENTS = {
    1: (0.7326495, 0.690),
    2: (1.5374383, 1.338),
    3: (2.4016068, 1.901),
    4: (3.3112247, 2.358),
    5: (4.2534266, 2.705),
    6: (5.2177052, 2.954),
    7: (6.1962507, 3.125),
    8: (7.1836656, 3.238),
    9: (8.1764248, 3.311),
    10: (9.1723243, 3.356),
    11: (10.170032, 3.384),
    12: (11.168765, 3.401),
    13: (12.168070, 3.410),
    14: (13.167693, 3.416),
    15: (14.167488, 3.419),
    16: (15.167379, 3.421),
}

# (minimum n, block length L)
_UNIVERSAL_TABLE = (
    (387840, 6),
    (904960, 7),
    (2068480, 8),
    (4654080, 9),
    (10342400, 10),
    (22753280, 11),
    (49643520, 12),
    (107560960, 13),
    (231669760, 14),
    (496435200, 15),
    (1059061760, 16),
)


def universal(
    bits: Bits, block_length: int | None = None, init_blocks: int | None = None
) -> TestResult:
    """Compression-style distance statistic.

    Without overrides ``L`` and the ``10 * 2**L`` initialization blocks follow
    the stream length; explicit values allow short worked cases.
    """
    test = RandomnessTest.UNIVERSAL
    if block_length is None:
        n = require_length(test, bits, UNIVERSAL_MIN_BITS)
        length = next(size for floor, size in reversed(_UNIVERSAL_TABLE) if n >= floor)
    elif block_length in UNIVERSAL_MOMENTS:
        length = block_length
    else:
        raise BadParamsError(f"{test.value} block length must lie in [1, 16]")
    expected, variance = UNIVERSAL_MOMENTS[length]
    if init_blocks is None:
        init_blocks = 10 * (1 << length)
    if init_blocks < 1:
        raise BadParamsError(f"{test.value} needs at least one initialization block")
    n = require_length(test, bits, (init_blocks + 1) * length)
    total_blocks = n // length
    test_blocks = total_blocks - init_blocks
    values = window_values(bits[: total_blocks * length], length, cyclic=False)[::length]
    # Previous occurrence of each block value, via a stable sort by value.
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    previous = np.zeros(total_blocks, dtype=np.int64)
    same = sorted_values[1:] == sorted_values[:-1]
    previous[order[1:][same]] = order[:-1][same] + 1
    positions = np.arange(init_blocks + 1, total_blocks + 1, dtype=np.int64)
    distances = positions - previous[init_blocks:]
    f_n = float(np.mean(np.log2(distances)))
    c = 0.7 - 0.8 / length + (4.0 + 32.0 / length) * test_blocks ** (-3.0 / length) / 15.0
    sigma = c * math.sqrt(variance / test_blocks)
    return result(
        test,
        erfc(abs(f_n - expected) / (math.sqrt(2.0) * sigma)),
        n=n,
        block_length=length,
        init_blocks=init_blocks,
        test_blocks=test_blocks,
        f_n=f_n,
    )
