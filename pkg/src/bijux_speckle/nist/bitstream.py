"""Ciphertext bitstreams: quantization of measurements and the stream file.

Stream file layout: little-endian u64 bit count followed by the bits packed
eight per byte, first bit in the least-significant position.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
import struct

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.constants import QUANTIZATION_BITS
from bijux_speckle.datasets.image import Image
from bijux_speckle.enums import QuantizationScheme
from bijux_speckle.errors import (
    DegenerateRangeError,
    EmptyDatasetError,
    ParamOutOfRangeError,
    TruncatedFileError,
)
from bijux_speckle.measurement.forward import Measurement
from bijux_speckle.utilities.io import atomic_write_bytes
from bijux_speckle.utilities.numeric import round_half_up

_LENGTH = struct.Struct("<Q")


@dataclass(frozen=True, eq=False)
class BitStream:
    """Sequence of bits held one per uint8 element."""

    bits: NDArray[np.uint8]

    def __post_init__(self) -> None:
        bits = np.asarray(self.bits, dtype=np.uint8).reshape(-1)
        if bits.size and bits.max() > 1:
            raise ParamOutOfRangeError("bitstream entries must be 0 or 1")
        bits = bits.copy()
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, text: str) -> BitStream:
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def __len__(self) -> int:
        return self.n

    def packed(self) -> bytes:
        return np.packbits(self.bits, bitorder="little").tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitStream):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    __hash__ = None  # type: ignore[assignment]


def _concatenate(measurements: Sequence[Measurement]) -> NDArray[np.float64]:
    if not measurements:
        raise EmptyDatasetError("cannot quantize an empty measurement list")
    values = np.concatenate([item.values for item in measurements])
    if not np.all(np.isfinite(values)):
        raise ParamOutOfRangeError("measurement values must be finite")
    return values


def quantize_values(values: NDArray[np.floating]) -> BitStream:
    """Affine map of [min, max] onto 16-bit codes, each emitted LSB first."""
    data = np.asarray(values, dtype=np.float64).reshape(-1)
    lo = float(data.min())
    hi = float(data.max())
    if hi <= lo:
        raise DegenerateRangeError(f"all {data.size} values equal {lo}")
    top = (1 << QUANTIZATION_BITS) - 1
    codes = np.clip(round_half_up((data - lo) / (hi - lo) * top), 0, top)
    raw = codes.astype("<u2").view(np.uint8)
    return BitStream(np.unpackbits(raw, bitorder="little"))


def quantize(measurements: Sequence[Measurement]) -> BitStream:
    """16 bits per value, vectors concatenated in order."""
    return quantize_values(_concatenate(measurements))


def median_quantize_values(values: NDArray[np.floating]) -> BitStream:
    data = np.asarray(values, dtype=np.float64).reshape(-1)
    if data.max() <= data.min():
        raise DegenerateRangeError(f"all {data.size} values equal {data[0]}")
    return BitStream((data > np.median(data)).astype(np.uint8))


def median_quantize(measurements: Sequence[Measurement]) -> BitStream:
    """One bit per value: 1 above the global median, 0 otherwise."""
    return median_quantize_values(_concatenate(measurements))


def quantize_with(
    measurements: Sequence[Measurement], scheme: QuantizationScheme
) -> BitStream:
    if scheme is QuantizationScheme.MEDIAN:
        return median_quantize(measurements)
    return quantize(measurements)


def image_bits(img: Image) -> BitStream:
    """Plaintext stream: row-major pixels, eight bits each, LSB first."""
    return BitStream(np.unpackbits(img.pixels.reshape(-1), bitorder="little"))


def write_bitstream(stream: BitStream, path: str | Path) -> Path:
    return atomic_write_bytes(path, _LENGTH.pack(stream.n) + stream.packed())


def read_bitstream(path: str | Path) -> BitStream:
    source = Path(path)
    raw = source.read_bytes()
    if len(raw) < _LENGTH.size:
        raise TruncatedFileError(source, expected=_LENGTH.size, found=len(raw))
    (count,) = _LENGTH.unpack_from(raw)
    expected = _LENGTH.size + (count + 7) // 8
    if len(raw) < expected:
        raise TruncatedFileError(source, expected=expected, found=len(raw))
    packed = np.frombuffer(raw, dtype=np.uint8, offset=_LENGTH.size)
    return BitStream(np.unpackbits(packed, bitorder="little", count=count))
