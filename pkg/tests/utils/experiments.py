"""Small experiment configs over synthetic IDX files."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from bijux_speckle.experiments import ExperimentConfig, parse_config

from .synthetic import stroke_dataset, write_idx_pair


def write_splits(directory: Path, *, train: int = 30, test: int = 12, size: int = 8) -> dict[str, str]:
    """Train and test IDX pairs under ``directory``; returns the dataset section."""
    directory.mkdir(parents=True, exist_ok=True)
    train_images, train_labels = write_idx_pair(
        stroke_dataset(train, size=size, seed=1), directory, "train"
    )
    test_images, test_labels = write_idx_pair(
        stroke_dataset(test, size=size, seed=2), directory, "t10k"
    )
    return {
        "train_images": str(train_images),
        "train_labels": str(train_labels),
        "test_images": str(test_images),
        "test_labels": str(test_labels),
    }


def small_config(directory: Path, kind: str, **overrides: Any) -> ExperimentConfig:
    raw: dict[str, Any] = {
        "kind": kind,
        "name": f"{kind}-test",
        "dataset": write_splits(directory / "data"),
        "rates": [0.5],
        "decoder": {"epochs": 2, "batch_size": 8, "hidden": 8, "learning_rate": 0.01},
    }
    raw.update(overrides)
    return parse_config(raw)


def write_yaml(path: Path, payload: dict[str, Any]) -> Path:
    path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
    return path
