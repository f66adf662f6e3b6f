"""Single-pixel forward model: patterns times scene, averaged over the mask."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
import logging
from typing import Any

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.datasets.image import Image, LabeledDataset
from bijux_speckle.errors import DimensionMismatchError, ParamOutOfRangeError
from bijux_speckle.patterns.fast import HadamardSampler, measure_hadamard_fast
from bijux_speckle.patterns.pattern_set import PatternSet
from bijux_speckle.utilities.rng import SplitMix64

logger = logging.getLogger(__name__)

Acquisition = PatternSet | HadamardSampler
_BATCH = 512


@dataclass(frozen=True, eq=False)
class Measurement:
    """One coupled-intensity vector with the provenance needed to redo it."""

    values: NDArray[np.float64]
    pattern_seed: int
    mask_descriptor: dict[str, Any] = field(default_factory=dict)
    sampling_rate: float = 1.0
    label: int | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True).reshape(-1)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def m(self) -> int:
        return int(self.values.size)


def _field_shape(acq: Acquisition) -> tuple[int, int]:
    return (acq.mask.height, acq.mask.width)


def _check_shape(acq: Acquisition, shape: tuple[int, ...]) -> None:
    if tuple(shape[-2:]) != _field_shape(acq):
        raise DimensionMismatchError(
            f"patterns cover {acq.mask.width}x{acq.mask.height}, "
            f"image is {shape[-1]}x{shape[-2]}"
        )


def measure_array(
    array: NDArray[np.floating], acq: Acquisition
) -> NDArray[np.float64]:
    """Real-valued path: one ``(h, w)`` image or a ``(count, h, w)`` stack."""
    values = np.asarray(array, dtype=np.float64)
    _check_shape(acq, values.shape)
    if isinstance(acq, HadamardSampler):
        return measure_hadamard_fast(acq, values)
    active = values.reshape(*values.shape[:-2], -1)[..., acq.mask.active_indices]
    return np.asarray(active @ acq.matrix.T, dtype=np.float64) / acq.n_active


def _provenance(acq: Acquisition) -> tuple[dict[str, Any], float]:
    return acq.mask.describe(), float(acq.sampling_rate)


def measure(img: Image, acq: Acquisition, label: int | None = None) -> Measurement:
    """``values[k] = sum(pattern_k * img) / N_active``."""
    _check_shape(acq, img.shape)
    descriptor, rate = _provenance(acq)
    return Measurement(
        values=measure_array(img.pixels, acq),
        pattern_seed=acq.seed,
        mask_descriptor=descriptor,
        sampling_rate=rate,
        label=label,
    )


def add_noise(
    values: NDArray[np.float64], snr_db: float, seed: int, index: int
) -> NDArray[np.float64]:
    """Zero-mean Gaussian noise at ``snr_db`` relative to the vector's mean power."""
    power = float(np.mean(values * values))
    if power == 0.0:
        return values.copy()
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    draws = SplitMix64(seed).spawn("noise", index).normal(values.size)
    return values + sigma * draws


def measure_dataset(
    ds: LabeledDataset,
    acq: Acquisition,
    noise_snr_db: float | None = None,
    seed: int = 0,
) -> list[Measurement]:
    """Measure every image in order; noise draws depend only on (seed, index)."""
    _check_shape(acq, ds.pixels.shape)
    if noise_snr_db is not None and not np.isfinite(noise_snr_db):
        raise ParamOutOfRangeError(f"noise SNR must be finite, got {noise_snr_db}")
    descriptor, rate = _provenance(acq)
    results: list[Measurement] = []
    for start in range(0, len(ds), _BATCH):
        block = measure_array(ds.pixels[start : start + _BATCH], acq)
        for offset, values in enumerate(block):
            index = start + offset
            if noise_snr_db is not None:
                values = add_noise(values, noise_snr_db, seed, index)
            results.append(
                Measurement(
                    values=values,
                    pattern_seed=acq.seed,
                    mask_descriptor=descriptor,
                    sampling_rate=rate,
                    label=int(ds.labels[index]),
                )
            )
    logger.info(
        "Measured dataset",
        extra={
            "context": {
                "count": len(results),
                "m": acq.m,
                "n_active": acq.n_active,
                "noise_snr_db": noise_snr_db,
            }
        },
    )
    return results


def stack_values(measurements: Sequence[Measurement]) -> NDArray[np.float64]:
    """``(count, m)`` matrix of measurement values."""
    if not measurements:
        return np.zeros((0, 0), dtype=np.float64)
    return np.stack([item.values for item in measurements])


def labels_of(measurements: Sequence[Measurement]) -> NDArray[np.int64]:
    labels = [item.label for item in measurements]
    if any(label is None for label in labels):
        raise ParamOutOfRangeError("every measurement needs a label")
    return np.asarray(labels, dtype=np.int64)
