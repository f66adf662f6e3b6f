"""Running single tests and the full battery over a bitstream."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Any

from bijux_speckle.enums import EXTENDED_TESTS, TABLE_TESTS, RandomnessTest
from bijux_speckle.errors import (
    InsufficientLengthError,
    TestNotApplicableError,
)

from .bitstream import BitStream
from .rules import RULES
from .rules.types import TestResult

logger = logging.getLogger(__name__)

BATTERY_MIN_BITS = 100


def run_test(
    kind: RandomnessTest | str, bits: BitStream, **params: Any
) -> TestResult:
    """Run one test; raises when the stream is too short or the test undefined."""
    test = RandomnessTest(kind)
    return RULES[test](bits.bits, **params)


@dataclass(frozen=True)
class BatteryReport:
    n: int
    results: tuple[TestResult, ...]
    params: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def passed_count(self) -> int:
        return sum(1 for item in self.results if item.passed)

    @property
    def applicable_count(self) -> int:
        return sum(1 for item in self.results if not item.skipped)

    def result_for(self, test: RandomnessTest) -> TestResult | None:
        return next((item for item in self.results if item.test is test), None)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "passed": self.passed_count,
            "applicable": self.applicable_count,
            "params": self.params,
            "results": [item.to_dict() for item in self.results],
        }


def _run_guarded(
    test: RandomnessTest, bits: BitStream, params: Mapping[str, Any]
) -> TestResult:
    try:
        return run_test(test, bits, **params)
    except (InsufficientLengthError, TestNotApplicableError) as exc:
        return TestResult(test=test, skipped_reason=str(exc))


def battery_tests(include_extended: bool = False) -> tuple[RandomnessTest, ...]:
    return TABLE_TESTS + EXTENDED_TESTS if include_extended else TABLE_TESTS


def run_battery(
    bits: BitStream,
    *,
    include_extended: bool = False,
    tests: Sequence[RandomnessTest] | None = None,
    params: Mapping[RandomnessTest, Mapping[str, Any]] | None = None,
    workers: int = 1,
) -> BatteryReport:
    """Every test in report order; short or undefined cases are recorded as skipped."""
    if bits.n < BATTERY_MIN_BITS:
        raise InsufficientLengthError("battery", BATTERY_MIN_BITS, bits.n)
    selected = tuple(tests) if tests is not None else battery_tests(include_extended)
    overrides = dict(params or {})
    jobs = [(test, dict(overrides.get(test, {}))) for test in selected]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = tuple(
                pool.map(lambda job: _run_guarded(job[0], bits, job[1]), jobs)
            )
    else:
        results = tuple(_run_guarded(test, bits, job) for test, job in jobs)
    report = BatteryReport(
        n=bits.n,
        results=results,
        params={test.value: job for test, job in jobs if job},
    )
    logger.info(
        "Battery finished",
        extra={
            "context": {
                "n": bits.n,
                "passed": report.passed_count,
                "applicable": report.applicable_count,
                "tests": len(results),
            }
        },
    )
    return report
