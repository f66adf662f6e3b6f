"""Non-overlapping and overlapping template matching."""

from __future__ import annotations

from collections.abc import Sequence
from functools import lru_cache
import math

import numpy as np
from numpy.typing import NDArray
from scipy.special import gammaincc

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import BadParamsError

from .types import Bits, TestResult, require_length, result, window_values

DEFAULT_TEMPLATE = "000000001"
NON_OVERLAPPING_BLOCKS = 8
# Expected matches per block below which the chi-square approximation breaks down.
NON_OVERLAPPING_MIN_EXPECTED = 5.0
OVERLAPPING_TEMPLATE_LENGTH = 9
OVERLAPPING_BLOCK_SIZE = 1032
OVERLAPPING_MIN_BITS = 1_000_000
OVERLAPPING_PROBABILITIES = (0.364091, 0.185659, 0.139381, 0.100571, 0.0704323, 0.139865)


def _parse_template(template: str) -> tuple[int, int]:
    if not template or set(template) - {"0", "1"}:
        raise BadParamsError(f"template must be a nonempty 0/1 string, got {template!r}")
    return int(template, 2), len(template)


def is_aperiodic(template: str) -> bool:
    """No proper shift of the template overlaps itself."""
    length = len(template)
    return all(template[shift:] != template[: length - shift] for shift in range(1, length))


@lru_cache(maxsize=16)
def aperiodic_templates(length: int) -> tuple[str, ...]:
    """All aperiodic templates of ``length`` bits (148 for length 9)."""
    candidates = (format(value, f"0{length}b") for value in range(1 << length))
    return tuple(template for template in candidates if is_aperiodic(template))


def _count_non_overlapping(
    positions: NDArray[np.int64], block_size: int, blocks: int, length: int
) -> NDArray[np.int64]:
    counts = np.zeros(blocks, dtype=np.int64)
    next_free = -1
    current_block = -1
    for position in positions.tolist():
        block, offset = divmod(position, block_size)
        if block >= blocks:
            break
        if offset > block_size - length:
            continue
        if block != current_block:
            current_block = block
            next_free = 0
        if offset >= next_free:
            counts[block] += 1
            next_free = offset + length
    return counts


def non_overlapping_template(
    bits: Bits,
    template: str = DEFAULT_TEMPLATE,
    blocks: int = NON_OVERLAPPING_BLOCKS,
    all_templates: bool = False,
    min_expected: float = NON_OVERLAPPING_MIN_EXPECTED,
) -> TestResult:
    """Occurrence counts of aperiodic templates in ``blocks`` equal blocks.

    With ``all_templates`` every aperiodic template of the same length is
    tested and one p-value is reported per template. Streams whose blocks
    expect fewer than ``min_expected`` matches are rejected as too short.
    """
    test = RandomnessTest.NON_OVERLAPPING_TEMPLATE
    _, length = _parse_template(template)
    if blocks < 1:
        raise BadParamsError(f"{test.value} needs at least one block")
    if min_expected < 0:
        raise BadParamsError(f"{test.value} min_expected must be >= 0, got {min_expected}")
    block_floor = max(length, math.ceil(min_expected * 2.0**length) + length - 1)
    n = require_length(test, bits, blocks * block_floor)
    block_size = n // blocks
    windows = window_values(bits, length, cyclic=False)
    chosen = aperiodic_templates(length) if all_templates else (template,)
    mean = (block_size - length + 1) / 2.0**length
    variance = block_size * (1.0 / 2.0**length - (2.0 * length - 1.0) / 2.0 ** (2 * length))
    p_values = []
    for candidate in chosen:
        positions = np.flatnonzero(windows == int(candidate, 2))
        counts = _count_non_overlapping(positions, block_size, blocks, length)
        chi2 = float(np.sum((counts - mean) ** 2) / variance)
        p_values.append(gammaincc(blocks / 2.0, chi2 / 2.0))
    return result(
        test,
        *p_values,
        n=n,
        templates=list(chosen) if all_templates else [template],
        blocks=blocks,
        block_size=block_size,
        mean=mean,
        variance=variance,
    )


def overlapping_template(bits: Bits) -> TestResult:
    """Overlapping occurrences of nine ones in blocks of 1032 bits."""
    test = RandomnessTest.OVERLAPPING_TEMPLATE
    n = require_length(test, bits, OVERLAPPING_MIN_BITS)
    length = OVERLAPPING_TEMPLATE_LENGTH
    size = OVERLAPPING_BLOCK_SIZE
    blocks = n // size
    data = bits[: blocks * size].reshape(blocks, size).astype(np.int64)
    running = np.concatenate(
        (np.zeros((blocks, 1), dtype=np.int64), np.cumsum(data, axis=1)), axis=1
    )
    window_sums = running[:, length:] - running[:, :-length]
    occurrences = np.count_nonzero(window_sums == length, axis=1)
    classes = len(OVERLAPPING_PROBABILITIES)
    counts = np.bincount(np.minimum(occurrences, classes - 1), minlength=classes)
    p_value, chi2 = overlapping_p_value(counts)
    return result(
        test,
        p_value,
        n=n,
        blocks=blocks,
        counts=counts.tolist(),
        chi2=chi2,
    )


def overlapping_p_value(
    counts: Sequence[int] | NDArray[np.int64],
    probabilities: Sequence[float] = OVERLAPPING_PROBABILITIES,
) -> tuple[float, float]:
    """``(p, chi2)`` for per-class block counts against class probabilities."""
    observed = np.asarray(counts, dtype=np.float64)
    if observed.size != len(probabilities):
        raise BadParamsError(
            f"expected {len(probabilities)} class counts, got {observed.size}"
        )
    expected = observed.sum() * np.asarray(probabilities, dtype=np.float64)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return float(gammaincc((observed.size - 1) / 2.0, chi2 / 2.0)), chi2
