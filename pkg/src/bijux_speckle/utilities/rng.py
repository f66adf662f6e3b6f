"""Counter-based SplitMix64 generator shared by every seeded stage.

Output ``i`` (zero-based) of a stream with seed ``s`` is
``mix(s + (i + 1) * 0x9E3779B97F4A7C15 mod 2**64)`` where ``mix`` is the
SplitMix64 finalizer. Derived streams use ``spawn`` so that kernels, pattern
permutations, noise and training shuffles never share draws. The exact bit
layout is documented in ``docs/prng.md``.
"""

from __future__ import annotations

import hashlib

import numpy as np
from numpy.typing import NDArray

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
SPAWN_GAMMA = 0xD1B54A32D192ED03
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)


def mix64(value: int) -> int:
    """SplitMix64 finalizer on a Python integer."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix_array(z: NDArray[np.uint64]) -> NDArray[np.uint64]:
    z = (z ^ (z >> _U30)) * np.uint64(_M1)
    z = (z ^ (z >> _U27)) * np.uint64(_M2)
    return z ^ (z >> _U31)


def _key_to_int(key: int | str) -> int:
    if isinstance(key, int):
        return key & MASK64
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class SplitMix64:
    """Deterministic 64-bit generator; draws are a pure function of (seed, index)."""

    def __init__(self, seed: int) -> None:
        self.seed = seed & MASK64
        self.counter = 0

    def spawn(self, *keys: int | str) -> SplitMix64:
        """Return an independent child stream keyed by ``keys``."""
        state = self.seed
        for key in keys:
            state = mix64(state + ((_key_to_int(key) + 1) * SPAWN_GAMMA))
        return SplitMix64(state)

    def next_u64(self, count: int) -> NDArray[np.uint64]:
        start = self.counter
        self.counter += count
        with np.errstate(over="ignore"):
            counters = np.arange(start + 1, start + count + 1, dtype=np.uint64)
            z = counters * np.uint64(GOLDEN_GAMMA) + np.uint64(self.seed)
            return _mix_array(z)

    def uniform(self, count: int) -> NDArray[np.float64]:
        """Floats in [0, 1) built from the top 53 bits."""
        return (self.next_u64(count) >> _U11).astype(np.float64) * (2.0**-53)

    def normal(self, count: int) -> NDArray[np.float64]:
        """Standard normal draws via Box-Muller (one normal per uniform pair)."""
        u1 = self.uniform(count)
        u2 = self.uniform(count)
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        return radius * np.cos(2.0 * np.pi * u2)

    def integers(self, count: int, high: int) -> NDArray[np.int64]:
        """Integers in [0, high)."""
        if high <= 0:
            raise ValueError("high must be positive")
        values = np.floor(self.uniform(count) * high).astype(np.int64)
        return np.minimum(values, high - 1)

    def permutation(self, count: int) -> NDArray[np.int64]:
        """Random permutation of ``range(count)``: stable argsort of u64 keys."""
        keys = self.next_u64(count)
        return np.argsort(keys, kind="stable").astype(np.int64)

    def bits(self, count: int) -> NDArray[np.uint8]:
        """``count`` bits, least-significant bit of each word first."""
        words = self.next_u64((count + 63) // 64)
        raw = words.astype("<u8").view(np.uint8)
        return np.unpackbits(raw, bitorder="little")[:count]
