"""Histogram Shannon entropy of 8-bit images, in bits."""

from __future__ import annotations

from dataclasses import dataclass
import logging
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.stats import entropy as scipy_entropy

from bijux_speckle.constants import GRAY_LEVELS
from bijux_speckle.datasets.image import Image, LabeledDataset
from bijux_speckle.errors import EmptyDatasetError
from bijux_speckle.utilities.io import atomic_write_csv

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class EntropyReport:
    per_image: NDArray[np.float64]
    mean: float
    histogram_bins: int = GRAY_LEVELS

    def summary(self) -> dict[str, Any]:
        return {
            "count": int(self.per_image.size),
            "mean": self.mean,
            "min": float(self.per_image.min()),
            "max": float(self.per_image.max()),
            "histogram_bins": self.histogram_bins,
        }


def histograms(stack: NDArray[np.uint8]) -> NDArray[np.int64]:
    """``(count, 256)`` pixel histograms of a ``(count, h, w)`` stack."""
    count = stack.shape[0]
    flat = stack.reshape(count, -1).astype(np.int64)
    offsets = (np.arange(count, dtype=np.int64) * GRAY_LEVELS)[:, None]
    counts = np.bincount((flat + offsets).ravel(), minlength=count * GRAY_LEVELS)
    return counts.reshape(count, GRAY_LEVELS)


def image_entropy(img: Image) -> float:
    """``sum P(l) log2(1 / P(l))`` over the 256-bin histogram; empty bins add 0."""
    counts = np.bincount(img.pixels.ravel(), minlength=GRAY_LEVELS)
    return float(scipy_entropy(counts, base=2))


def dataset_entropy(ds: LabeledDataset) -> EntropyReport:
    if len(ds) == 0:
        raise EmptyDatasetError("entropy of an empty dataset is undefined")
    per_image = np.asarray(
        scipy_entropy(histograms(ds.pixels), base=2, axis=1), dtype=np.float64
    )
    report = EntropyReport(per_image=per_image, mean=float(per_image.mean()))
    logger.info("Dataset entropy", extra={"context": report.summary()})
    return report


def write_entropy_csv(report: EntropyReport, path: str | Path) -> Path:
    """Rows ``image_index,entropy`` and a closing ``mean`` row."""
    rows: list[list[object]] = [
        [index, float(value)] for index, value in enumerate(report.per_image)
    ]
    rows.append(["mean", report.mean])
    return atomic_write_csv(path, ["image_index", "entropy"], rows)
