"""Centralized semantic enums for Bijux Speckle."""

from __future__ import annotations

from enum import Enum


class ScatterFamily(str, Enum):
    """Surrogate scattering models."""

    MONTE_LIKE = "monte_like"
    SCATNET_LIKE = "scatnet_like"
    TRANSFER_MATRIX = "transfer_matrix"

    @property
    def code(self) -> int:
        return _FAMILY_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> ScatterFamily:
        for family, value in _FAMILY_CODES.items():
            if value == code:
                return family
        raise ValueError(f"Unknown scatter family code: {code}")


_FAMILY_CODES = {
    ScatterFamily.MONTE_LIKE: 1,
    ScatterFamily.SCATNET_LIKE: 2,
    ScatterFamily.TRANSFER_MATRIX: 3,
}


class MaskStrategy(str, Enum):
    """Regional field-of-view strategies."""

    FULL = "full"
    A_CENTRAL = "A_central"
    B_INTERLEAVED = "B_interleaved"


class PatternKind(str, Enum):
    HADAMARD_PERMUTED = "hadamard_permuted"
    LEARNED = "learned"

    @property
    def code(self) -> int:
        return 1 if self is PatternKind.HADAMARD_PERMUTED else 2

    @classmethod
    def from_code(cls, code: int) -> PatternKind:
        if code == 1:
            return cls.HADAMARD_PERMUTED
        if code == 2:
            return cls.LEARNED
        raise ValueError(f"Unknown pattern kind code: {code}")


class OptimizerKind(str, Enum):
    SGD = "sgd"
    ADAM = "adam"


class TrainMode(str, Enum):
    """Whether the modulation patterns are fixed or trained with the decoder."""

    FIXED_PATTERNS = "fixed_patterns"
    END_TO_END = "end_to_end"


class ExperimentKind(str, Enum):
    RATE_SWEEP = "rate_sweep"
    WIDTH_SWEEP = "width_sweep"
    STRENGTH_SWEEP = "strength_sweep"
    ENTROPY_REPORT = "entropy_report"
    NIST_REPORT = "nist_report"
    E2E_COMPARE = "e2e_compare"
    MODULATOR_COMPARE = "modulator_compare"


class QuantizationScheme(str, Enum):
    """Intensity-to-bit mappings for ciphertext streams."""

    AFFINE16 = "affine16"
    MEDIAN = "median"


class RandomnessTest(str, Enum):
    """Statistical tests of the randomness battery."""

    FREQUENCY = "Frequency"
    BLOCK_FREQUENCY = "BlockFrequency"
    CUMULATIVE_SUMS = "CumulativeSums"
    RANK = "Rank"
    FFT = "FFT"
    NON_OVERLAPPING_TEMPLATE = "NonOverlappingTemplate"
    OVERLAPPING_TEMPLATE = "OverlappingTemplate"
    UNIVERSAL = "Universal"
    APPROXIMATE_ENTROPY = "ApproximateEntropy"
    RANDOM_EXCURSIONS = "RandomExcursions"
    SERIAL = "Serial"
    LINEAR_COMPLEXITY = "LinearComplexity"
    RUNS = "Runs"
    LONGEST_RUN = "LongestRun"
    RANDOM_EXCURSIONS_VARIANT = "RandomExcursionsVariant"


TABLE_TESTS: tuple[RandomnessTest, ...] = (
    RandomnessTest.FREQUENCY,
    RandomnessTest.BLOCK_FREQUENCY,
    RandomnessTest.CUMULATIVE_SUMS,
    RandomnessTest.RANK,
    RandomnessTest.FFT,
    RandomnessTest.NON_OVERLAPPING_TEMPLATE,
    RandomnessTest.OVERLAPPING_TEMPLATE,
    RandomnessTest.UNIVERSAL,
    RandomnessTest.APPROXIMATE_ENTROPY,
    RandomnessTest.RANDOM_EXCURSIONS,
    RandomnessTest.SERIAL,
    RandomnessTest.LINEAR_COMPLEXITY,
)
"""Default battery, in report order."""

EXTENDED_TESTS: tuple[RandomnessTest, ...] = (
    RandomnessTest.RUNS,
    RandomnessTest.LONGEST_RUN,
    RandomnessTest.RANDOM_EXCURSIONS_VARIANT,
)
