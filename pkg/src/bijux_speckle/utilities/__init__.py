"""Utilities package for Bijux Speckle.

Logging, version resolution, fingerprints, the shared PRNG and atomic IO.
"""

from __future__ import annotations

from .logger_manager import LoggerConfig, LoggerManager, MetricType
from .rng import SplitMix64

__all__ = [
    "LoggerConfig",
    "LoggerManager",
    "MetricType",
    "SplitMix64",
]
