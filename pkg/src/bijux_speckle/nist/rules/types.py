"""Result type and shared helpers for randomness tests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import SIGNIFICANCE_LEVEL
from bijux_speckle.enums import RandomnessTest
from bijux_speckle.errors import InsufficientLengthError

Bits = NDArray[np.uint8]


@dataclass(frozen=True)
class TestResult:
    """Outcome of one test; multi-part tests carry several p-values."""

    __test__ = False

    test: RandomnessTest
    p_values: tuple[float, ...] = ()
    detail: dict[str, Any] = field(default_factory=dict)
    skipped_reason: str | None = None

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None

    @property
    def p_value(self) -> float | None:
        return min(self.p_values) if self.p_values else None

    @property
    def passed(self) -> bool:
        return (
            not self.skipped
            and bool(self.p_values)
            and min(self.p_values) >= SIGNIFICANCE_LEVEL
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "test": self.test.value,
            "p_values": list(self.p_values),
            "p_value": self.p_value,
            "passed": self.passed,
            "skipped_reason": self.skipped_reason,
            "detail": self.detail,
        }


def result(test: RandomnessTest, *p_values: float, **detail: Any) -> TestResult:
    clamped = tuple(float(min(1.0, max(0.0, value))) for value in p_values)
    return TestResult(test=test, p_values=clamped, detail=detail)


def require_length(test: RandomnessTest, bits: Bits, minimum: int) -> int:
    n = int(bits.size)
    if n < minimum:
        raise InsufficientLengthError(test.value, minimum, n)
    return n


def plus_minus(bits: Bits) -> NDArray[np.int64]:
    """Map bits {0, 1} to steps {-1, +1}."""
    return 2 * bits.astype(np.int64) - 1


def window_values(bits: Bits, m: int, *, cyclic: bool) -> NDArray[np.int64]:
    """Integer value of every m-bit window, first bit most significant."""
    data = bits.astype(np.int64)
    if cyclic:
        data = np.concatenate((data, data[: m - 1]))
    count = data.size - m + 1
    values = np.zeros(max(count, 0), dtype=np.int64)
    for offset in range(m):
        values = (values << 1) | data[offset : offset + count]
    return values
