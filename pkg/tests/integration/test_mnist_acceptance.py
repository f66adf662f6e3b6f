"""End-to-end checks on the real MNIST files.

Skipped unless ``BIJUX_SPECKLE_MNIST_DIR`` points at a directory holding the
four standard IDX files (optionally gzipped).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from bijux_speckle.config.env import SpeckleSettings
from bijux_speckle.datasets import LabeledDataset, load_idx, resize_dataset, subset
from bijux_speckle.entropy import dataset_entropy
from bijux_speckle.experiments import parse_config, run_experiment
from bijux_speckle.scattering import ScatterConfig, build_operator, scatter_dataset

pytestmark = pytest.mark.integration


def _mnist_dir() -> Path:
    directory = SpeckleSettings().mnist_dir
    if directory is None or not directory.is_dir():
        pytest.skip("BIJUX_SPECKLE_MNIST_DIR not configured")
    return directory


def _idx(directory: Path, stem: str) -> Path:
    for candidate in (directory / stem, directory / f"{stem}.gz"):
        if candidate.exists():
            return candidate
    pytest.skip(f"{stem} not found under {directory}")


def _split(prefix: str) -> dict[str, Path]:
    directory = _mnist_dir()
    return {
        "images": _idx(directory, f"{prefix}-images-idx3-ubyte"),
        "labels": _idx(directory, f"{prefix}-labels-idx1-ubyte"),
    }


@pytest.fixture(scope="module")
def mnist_train() -> LabeledDataset:
    files = _split("train")
    return load_idx(files["images"], files["labels"])


def test_training_split_shape(mnist_train: LabeledDataset) -> None:
    assert len(mnist_train) == 60000
    assert (mnist_train.width, mnist_train.height) == (28, 28)
    assert set(np.unique(mnist_train.labels).tolist()) == set(range(10))


def test_unscattered_entropy(mnist_train: LabeledDataset) -> None:
    assert dataset_entropy(mnist_train).mean == pytest.approx(3.09, abs=0.15)


def test_scattering_raises_entropy(mnist_train: LabeledDataset) -> None:
    sample = resize_dataset(subset(mnist_train, 100, 0), 64, 64)
    op = build_operator(ScatterConfig(strength=0.75), 64, 64)
    plain = dataset_entropy(sample).mean
    scattered = dataset_entropy(scatter_dataset(op, sample)).mean
    assert scattered - plain >= 1.5


def _dataset_section() -> dict[str, str]:
    train_files = _split("train")
    test_files = _split("t10k")
    return {
        "train_images": str(train_files["images"]),
        "train_labels": str(train_files["labels"]),
        "test_images": str(test_files["images"]),
        "test_labels": str(test_files["labels"]),
    }


@pytest.mark.slow
def test_scattering_does_not_hurt_regional_accuracy(tmp_path: Path) -> None:
    cfg = parse_config(
        {
            "kind": "strength_sweep",
            "dataset": {
                **_dataset_section(),
                "width": 64,
                "height": 64,
                "train_size": 5000,
                "test_size": 1000,
            },
            "scatter": {"strengths": [0.0, 0.75]},
            "mask": {"strategy": "A_central", "params": [32]},
            "rates": [0.05],
            "seeds": [0, 1, 2],
            "decoder": {"epochs": 20, "batch_size": 64, "hidden": 256},
            "workers": 3,
        }
    )
    result = run_experiment(cfg, output_dir=tmp_path / "run")
    by_strength: dict[float, list[float]] = {}
    for cell in result.manifest.cells:
        by_strength.setdefault(cell["strength"], []).append(cell["accuracy"])
    assert np.mean(by_strength[0.75]) >= np.mean(by_strength[0.0])


@pytest.mark.slow
def test_scattered_ciphertext_passes_at_least_as_many_tests(tmp_path: Path) -> None:
    cfg = parse_config(
        {
            "kind": "nist_report",
            "dataset": _dataset_section(),
            "scatter": {"strengths": [0.0, 0.75]},
            "rates": [1.0],
            "nist": {"plaintext": False},
            "workers": 4,
        }
    )
    result = run_experiment(cfg, output_dir=tmp_path / "run")
    passed = {cell["strength"]: cell["passed"] for cell in result.manifest.cells}
    assert passed[0.75] >= passed[0.0]


def _mnist64(train_size: int = 5000, test_size: int = 1000) -> dict[str, object]:
    return {
        **_dataset_section(),
        "width": 64,
        "height": 64,
        "train_size": train_size,
        "test_size": test_size,
    }


@pytest.mark.slow
def test_full_field_hadamard_decoder_reaches_the_accuracy_floor(tmp_path: Path) -> None:
    cfg = parse_config(
        {
            "kind": "rate_sweep",
            "dataset": _mnist64(),
            "rates": [0.1],
            "decoder": {"epochs": 20, "batch_size": 64, "hidden": 256},
        }
    )
    result = run_experiment(cfg, output_dir=tmp_path / "run")
    (cell,) = result.manifest.cells
    assert cell["m"] == 410
    assert cell["accuracy"] >= 0.85


@pytest.mark.slow
def test_learned_patterns_match_hadamard_at_low_rate(tmp_path: Path) -> None:
    cfg = parse_config(
        {
            "kind": "e2e_compare",
            "dataset": _mnist64(),
            "rates": [0.005],
            "seeds": [0, 1, 2],
            "decoder": {"epochs": 20, "batch_size": 64, "hidden": 256},
            "workers": 3,
        }
    )
    result = run_experiment(cfg, output_dir=tmp_path / "run")
    cells = result.manifest.cells
    assert len(cells) == 3
    assert {cell["m"] for cell in cells} == {20}
    learned = np.mean([cell["e2e_accuracy"] for cell in cells])
    fixed = np.mean([cell["fixed_accuracy"] for cell in cells])
    assert learned >= fixed
