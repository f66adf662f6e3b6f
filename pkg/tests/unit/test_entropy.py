from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from tests.utils.synthetic import ramp_image, stroke_dataset

from bijux_speckle.datasets import Image, LabeledDataset
from bijux_speckle.entropy import dataset_entropy, image_entropy, write_entropy_csv
from bijux_speckle.errors import EmptyDatasetError


def test_constant_image_has_zero_entropy() -> None:
    assert image_entropy(Image(np.full((8, 8), 17, dtype=np.uint8))) == 0.0


def test_ramp_reaches_eight_bits() -> None:
    assert image_entropy(ramp_image()) == pytest.approx(8.0)


def test_two_levels_give_one_bit() -> None:
    pixels = np.zeros((4, 4), dtype=np.uint8)
    pixels[2:] = 255
    assert image_entropy(Image(pixels)) == pytest.approx(1.0)


def test_dataset_entropy_matches_per_image() -> None:
    dataset = stroke_dataset(5, size=12, seed=4)
    report = dataset_entropy(dataset)
    expected = [image_entropy(img) for img in dataset]
    assert np.allclose(report.per_image, expected)
    assert report.mean == pytest.approx(float(np.mean(expected)))
    assert report.summary()["count"] == 5


def test_empty_dataset_is_rejected() -> None:
    empty = LabeledDataset(np.zeros((0, 2, 2), dtype=np.uint8), np.zeros(0, dtype=np.int64))
    with pytest.raises(EmptyDatasetError):
        dataset_entropy(empty)


def test_entropy_csv_closes_with_mean(tmp_path: Path) -> None:
    report = dataset_entropy(stroke_dataset(3, size=8))
    lines = write_entropy_csv(report, tmp_path / "e.csv").read_text().splitlines()
    assert lines[0] == "image_index,entropy"
    assert len(lines) == 5
    assert lines[-1].startswith("mean,")


def test_entropy_ignores_pixel_order() -> None:
    img = stroke_dataset(1, size=16, seed=11)[0]
    order = np.random.default_rng(5).permutation(img.pixels.size)
    shuffled = Image(img.pixels.reshape(-1)[order].reshape(img.shape))
    assert image_entropy(shuffled) == pytest.approx(image_entropy(img), abs=1e-12)


def test_entropy_ignores_gray_level_relabeling() -> None:
    img = stroke_dataset(1, size=16, seed=12)[0]
    relabel = np.random.default_rng(6).permutation(256).astype(np.uint8)
    assert image_entropy(Image(relabel[img.pixels])) == pytest.approx(
        image_entropy(img), abs=1e-12
    )
