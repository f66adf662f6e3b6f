from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from tests.utils.experiments import write_splits, write_yaml
from typer.testing import CliRunner

from bijux_speckle.cli import app
from bijux_speckle.patterns import read_patterns_binary
from bijux_speckle.utilities.version import get_runtime_version

runner = CliRunner()


def _invoke(*args: str | Path):
    return runner.invoke(app, [str(arg) for arg in args])


def _experiment_yaml(tmp_path: Path, **overrides: object) -> Path:
    payload: dict[str, object] = {
        "kind": "rate_sweep",
        "name": "cli-sweep",
        "dataset": write_splits(tmp_path / "data"),
        "rates": [0.5],
        "decoder": {"epochs": 1, "batch_size": 8, "hidden": 4},
    }
    payload.update(overrides)
    return write_yaml(tmp_path / "experiment.yaml", payload)


def test_version_flag() -> None:
    result = _invoke("--version")
    assert result.exit_code == 0
    assert result.output.strip() == get_runtime_version()


def test_validate_accepts_good_config(tmp_path: Path) -> None:
    result = _invoke("validate", _experiment_yaml(tmp_path))
    assert result.exit_code == 0, result.output
    assert "rate_sweep" in result.output
    assert "ok" in result.output


def test_validate_lists_violations_with_exit_code_2(tmp_path: Path) -> None:
    config = _experiment_yaml(tmp_path, rates=[1.5, 0.0], workers=0)
    result = _invoke("validate", config)
    assert result.exit_code == 2
    for location in ("rates.0", "rates.1", "workers"):
        assert f"config error: {location}" in result.output


def test_validate_reports_yaml_position(tmp_path: Path) -> None:
    broken = tmp_path / "broken.yaml"
    broken.write_text("kind: rate_sweep\nrates: [0.1\n", encoding="utf-8")
    result = _invoke("validate", broken)
    assert result.exit_code == 2
    assert f"error: {broken}:" in result.output


def test_patterns_writes_frames_and_binary(tmp_path: Path) -> None:
    out = tmp_path / "patterns"
    result = _invoke(
        "patterns", "--width", "8", "--height", "8", "--rate", "0.25", "--seed", "3", "--out", out
    )
    assert result.exit_code == 0, result.output
    assert len(list(out.glob("pattern_*.pgm"))) == 16
    record = read_patterns_binary(out / "patterns.bin")
    assert record.frames.shape == (16, 8, 8)


def test_patterns_bad_rate_exits_with_3(tmp_path: Path) -> None:
    result = _invoke(
        "patterns", "--width", "8", "--height", "8", "--rate", "0", "--out", tmp_path / "p"
    )
    assert result.exit_code == 3
    assert "error: sampling rate" in result.output


def test_modulator_writes_rounded_gray_patterns(tmp_path: Path) -> None:
    out = tmp_path / "modulator"
    result = _invoke(
        "modulator",
        "--width", "8",
        "--height", "8",
        "--rate", "0.25",
        "--decimals", "1",
        "--out", out,
    )
    assert result.exit_code == 0, result.output
    frames = read_patterns_binary(out / "patterns.bin").frames
    assert frames.shape == (16, 8, 8)
    assert frames.max() == pytest.approx(1.0)
    assert np.allclose(frames * 10.0, np.round(frames * 10.0))
    assert len(list(out.glob("pattern_*.pgm"))) == 16


def test_measure_train_eval_nist_chain(tmp_path: Path) -> None:
    data = write_splits(tmp_path / "data")
    table = tmp_path / "train.csv"
    result = _invoke(
        "measure",
        "--images", data["train_images"],
        "--labels", data["train_labels"],
        "--rate", "0.5",
        "--out", table,
    )
    assert result.exit_code == 0, result.output
    header = table.read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",")[:2] == ["label", "v0"]
    assert len(header.split(",")) == 33

    model = tmp_path / "model.bin"
    result = _invoke(
        "train",
        "--measurements", table,
        "--out", model,
        "--epochs", "2",
        "--batch-size", "8",
        "--hidden", "4",
        "--loss-csv", tmp_path / "loss.csv",
    )
    assert result.exit_code == 0, result.output
    assert model.exists()
    assert len((tmp_path / "loss.csv").read_text(encoding="utf-8").splitlines()) == 3

    result = _invoke("eval", "--model", model, "--measurements", table)
    assert result.exit_code == 0, result.output
    assert "accuracy" in result.output

    result = _invoke("nist", "--measurements", table, "--out", tmp_path / "nist.csv")
    assert result.exit_code == 0, result.output
    # 30 images x 32 measurements x 16 bits.
    assert "stream lengths: stream=15360" in result.output.splitlines()
    assert (tmp_path / "nist.csv").exists()


def test_entropy_on_pgm_directory(tmp_path: Path) -> None:
    data = write_splits(tmp_path / "data")
    scattered = tmp_path / "scattered"
    result = _invoke(
        "scatter",
        "--images", data["test_images"],
        "--labels", data["test_labels"],
        "--strength", "0.5",
        "--out-images", tmp_path / "s-images.idx",
        "--out-labels", tmp_path / "s-labels.idx",
        "--pgm-out", scattered,
    )
    assert result.exit_code == 0, result.output
    assert len(list(scattered.glob("*.pgm"))) == 12
    result = _invoke("entropy", "--pgm-dir", scattered, "--out", tmp_path / "entropy.csv")
    assert result.exit_code == 0, result.output
    assert "mean" in result.output


def test_gradcheck_passes() -> None:
    result = _invoke("gradcheck", "--features", "6", "--hidden", "5", "--classes", "3")
    assert result.exit_code == 0, result.output
    assert "max_relative_error" in result.output


def test_run_writes_manifest_and_reruns(tmp_path: Path) -> None:
    out = tmp_path / "run"
    result = _invoke("run", _experiment_yaml(tmp_path), "--output-dir", out)
    assert result.exit_code == 0, result.output
    assert str(out / "manifest.json") in result.output.splitlines()
    assert (out / "rate_sweep.csv").exists()

    result = _invoke("run", "--from-manifest", out, "--output-dir", tmp_path / "again")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "again" / "rate_sweep.csv").read_bytes() == (
        out / "rate_sweep.csv"
    ).read_bytes()


def test_run_without_source_exits_with_2() -> None:
    result = _invoke("run")
    assert result.exit_code == 2
    assert "--from-manifest" in result.output
