"""Random excursions and the random excursions variant."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import math

import numpy as np
from numpy.typing import NDArray
from scipy.special import erfc, gammaincc

from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import TestNotApplicableError

from .types import Bits, TestResult, plus_minus, require_length, result

EXCURSIONS_MIN_BITS = 1_000_000
MIN_CYCLES = 500
EXCURSION_STATES = (-4, -3, -2, -1, 1, 2, 3, 4)
VARIANT_STATES = tuple(x for x in range(-9, 10) if x != 0)


def visit_probabilities(state: int) -> NDArray[np.float64]:
    """P(k visits to ``state`` in one cycle) for k = 0..4 and k >= 5."""
    x = abs(state)
    stay = 1.0 - 1.0 / (2.0 * x)
    probabilities = [stay]
    probabilities.extend(1.0 / (4.0 * x * x) * stay ** (k - 1) for k in range(1, 5))
    probabilities.append(1.0 / (2.0 * x) * stay**4)
    return np.asarray(probabilities)


@dataclass(frozen=True, eq=False)
class Excursions:
    """Partial sums of the +/-1 walk, split into zero-to-zero cycles."""

    walk: NDArray[np.int64]
    cycle_id: NDArray[np.int64]
    cycles: int

    @classmethod
    def of(cls, bits: Bits) -> Excursions:
        walk = np.cumsum(plus_minus(bits))
        zeros = walk == 0
        cycles = int(np.count_nonzero(zeros)) + (0 if walk[-1] == 0 else 1)
        # A zero closes the cycle it belongs to.
        cycle_id = np.concatenate(([0], np.cumsum(zeros)[:-1]))
        return cls(walk=walk, cycle_id=cycle_id, cycles=cycles)

    def visit_counts(self, state: int) -> NDArray[np.int64]:
        """Number of cycles visiting ``state`` exactly k times, k = 0..4 and >= 5."""
        visits = np.bincount(self.cycle_id[self.walk == state], minlength=self.cycles)
        return np.bincount(np.minimum(visits, 5), minlength=6)

    def total_visits(self, state: int) -> int:
        return int(np.count_nonzero(self.walk == state))


def excursion_p_value(
    counts: Sequence[int] | NDArray[np.int64], state: int
) -> tuple[float, float]:
    """``(p, chi2)`` for one state's visit-count classes."""
    observed = np.asarray(counts, dtype=np.float64)
    expected = observed.sum() * visit_probabilities(state)
    chi2 = float(np.sum((observed - expected) ** 2 / expected))
    return float(gammaincc(2.5, chi2 / 2.0)), chi2


def variant_p_value(total: int, cycles: int, state: int) -> float:
    spread = math.sqrt(2.0 * cycles * (4.0 * abs(state) - 2.0))
    return float(erfc(abs(total - cycles) / spread))


def _applicable(test: RandomnessTest, bits: Bits) -> Excursions:
    excursions = Excursions.of(bits)
    if excursions.cycles < MIN_CYCLES:
        raise TestNotApplicableError(
            test.value, f"{excursions.cycles} cycles, at least {MIN_CYCLES} needed"
        )
    return excursions


def random_excursions(bits: Bits) -> TestResult:
    """One p-value per state -4..-1, 1..4."""
    test = RandomnessTest.RANDOM_EXCURSIONS
    n = require_length(test, bits, EXCURSIONS_MIN_BITS)
    excursions = _applicable(test, bits)
    p_values = []
    chi2_values = {}
    for state in EXCURSION_STATES:
        p_value, chi2 = excursion_p_value(excursions.visit_counts(state), state)
        chi2_values[str(state)] = chi2
        p_values.append(p_value)
    return result(test, *p_values, n=n, cycles=excursions.cycles, chi2=chi2_values)


def random_excursions_variant(bits: Bits) -> TestResult:
    """One p-value per state -9..-1, 1..9 from total visit counts."""
    test = RandomnessTest.RANDOM_EXCURSIONS_VARIANT
    n = require_length(test, bits, EXCURSIONS_MIN_BITS)
    excursions = _applicable(test, bits)
    p_values = []
    visits = {}
    for state in VARIANT_STATES:
        total = excursions.total_visits(state)
        visits[str(state)] = total
        p_values.append(variant_p_value(total, excursions.cycles, state))
    return result(test, *p_values, n=n, cycles=excursions.cycles, visits=visits)
