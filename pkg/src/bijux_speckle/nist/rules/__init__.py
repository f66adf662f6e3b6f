"""Randomness tests organized by statistic family, plus their registry."""

from __future__ import annotations

from collections.abc import Callable

from bijux_speckle.enums import RandomnessTest

from .complexity import berlekamp_massey, complexity_p_value, linear_complexity
from .excursions import (
    Excursions,
    excursion_p_value,
    random_excursions,
    random_excursions_variant,
    variant_p_value,
)
from .frequency import block_frequency, cumulative_sums, frequency
from .matrix import binary_matrix_rank, gf2_rank, rank_p_value
from .runs import longest_run, runs
from .serial import approximate_entropy, serial
from .spectral import spectral
from .templates import (
    aperiodic_templates,
    non_overlapping_template,
    overlapping_p_value,
    overlapping_template,
)
from .types import Bits, TestResult
from .universal import universal

Rule = Callable[..., TestResult]

RULES: dict[RandomnessTest, Rule] = {
    RandomnessTest.FREQUENCY: frequency,
    RandomnessTest.BLOCK_FREQUENCY: block_frequency,
    RandomnessTest.CUMULATIVE_SUMS: cumulative_sums,
    RandomnessTest.RANK: binary_matrix_rank,
    RandomnessTest.FFT: spectral,
    RandomnessTest.NON_OVERLAPPING_TEMPLATE: non_overlapping_template,
    RandomnessTest.OVERLAPPING_TEMPLATE: overlapping_template,
    RandomnessTest.UNIVERSAL: universal,
    RandomnessTest.APPROXIMATE_ENTROPY: approximate_entropy,
    RandomnessTest.RANDOM_EXCURSIONS: random_excursions,
    RandomnessTest.SERIAL: serial,
    RandomnessTest.LINEAR_COMPLEXITY: linear_complexity,
    RandomnessTest.RUNS: runs,
    RandomnessTest.LONGEST_RUN: longest_run,
    RandomnessTest.RANDOM_EXCURSIONS_VARIANT: random_excursions_variant,
}

if set(RULES) != set(RandomnessTest):
    missing = set(RandomnessTest) - set(RULES)
    raise RuntimeError(
        f"Every randomness test needs a rule: missing={sorted(t.value for t in missing)}"
    )

__all__ = [
    "RULES",
    "Bits",
    "Excursions",
    "Rule",
    "TestResult",
    "aperiodic_templates",
    "berlekamp_massey",
    "complexity_p_value",
    "excursion_p_value",
    "gf2_rank",
    "overlapping_p_value",
    "rank_p_value",
    "variant_p_value",
]
