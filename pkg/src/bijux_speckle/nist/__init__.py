"""Ciphertext bitstreams and the statistical randomness battery."""

from __future__ import annotations

from .battery import BatteryReport, battery_tests, run_battery, run_test
from .bitstream import (
    BitStream,
    image_bits,
    median_quantize,
    median_quantize_values,
    quantize,
    quantize_values,
    quantize_with,
    read_bitstream,
    write_bitstream,
)
from .report import battery_table_csv, battery_table_text, write_battery_text
from .rules import RULES
from .rules.types import TestResult

__all__ = [
    "RULES",
    "BatteryReport",
    "BitStream",
    "TestResult",
    "battery_table_csv",
    "battery_table_text",
    "battery_tests",
    "image_bits",
    "median_quantize",
    "median_quantize_values",
    "quantize",
    "quantize_values",
    "quantize_with",
    "read_bitstream",
    "run_battery",
    "run_test",
    "write_battery_text",
    "write_bitstream",
]
