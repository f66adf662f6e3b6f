from __future__ import annotations

from pathlib import Path

import pytest
import yaml
from tests.utils.experiments import write_splits, write_yaml
from tests.utils.synthetic import stroke_dataset, write_idx_pair

from bijux_speckle.enums import ExperimentKind, MaskStrategy, ScatterFamily
from bijux_speckle.errors import ConfigInvalidError, ConfigParseError
from bijux_speckle.experiments import (
    RunManifest,
    check_compatibility,
    dump_config,
    parse_config,
    read_manifest,
    validate_config,
    write_manifest,
)


def _relative_dataset(tmp_path: Path) -> dict[str, str]:
    data = tmp_path / "data"
    data.mkdir()
    images, labels = write_idx_pair(stroke_dataset(4, size=8), data, "train")
    return {
        "train_images": f"data/{images.name}",
        "train_labels": f"data/{labels.name}",
    }


def test_relative_paths_resolve_against_config_dir(tmp_path: Path) -> None:
    path = write_yaml(
        tmp_path / "entropy.yaml",
        {"kind": "entropy_report", "dataset": _relative_dataset(tmp_path)},
    )
    cfg = validate_config(path)
    assert cfg.kind is ExperimentKind.ENTROPY_REPORT
    assert cfg.dataset.train_images.is_absolute()
    assert cfg.dataset.train_images.parent == (tmp_path / "data").resolve()
    assert cfg.scatter.family is ScatterFamily.SCATNET_LIKE
    assert cfg.rates == [0.1]
    assert cfg.seeds == [0]


def test_every_violation_is_listed(tmp_path: Path) -> None:
    raw = {
        "kind": "rate_sweep",
        "dataset": write_splits(tmp_path),
        "rates": [0.0, 1.5],
        "workers": 0,
    }
    with pytest.raises(ConfigInvalidError) as excinfo:
        parse_config(raw)
    errors = excinfo.value.errors
    assert any(line.startswith("rates.0:") for line in errors)
    assert any(line.startswith("rates.1:") for line in errors)
    assert any(line.startswith("workers:") for line in errors)
    assert excinfo.value.exit_code == 2


def test_missing_dataset_file_names_field(tmp_path: Path) -> None:
    raw = {
        "kind": "entropy_report",
        "dataset": {"train_images": "absent-images", "train_labels": "absent-labels"},
    }
    with pytest.raises(ConfigInvalidError) as excinfo:
        parse_config(raw, base_dir=tmp_path)
    assert any(line.startswith("dataset.train_images:") for line in excinfo.value.errors)


def test_unknown_keys_are_rejected(tmp_path: Path) -> None:
    raw = {"kind": "entropy_report", "dataset": write_splits(tmp_path), "ratez": [0.1]}
    with pytest.raises(ConfigInvalidError, match="ratez"):
        parse_config(raw)


def test_accuracy_sweeps_need_a_test_split(tmp_path: Path) -> None:
    dataset = write_splits(tmp_path)
    dataset.pop("test_images")
    dataset.pop("test_labels")
    with pytest.raises(ConfigInvalidError, match="needs dataset.test_images"):
        parse_config({"kind": "rate_sweep", "dataset": dataset})


def test_modulator_decimals_are_bounded(tmp_path: Path) -> None:
    raw = {
        "kind": "modulator_compare",
        "dataset": write_splits(tmp_path),
        "modulator": {"decimals": [2, 7]},
    }
    with pytest.raises(ConfigInvalidError) as excinfo:
        parse_config(raw)
    assert any(line.startswith("modulator.decimals.1:") for line in excinfo.value.errors)
    raw["modulator"] = {}
    assert parse_config(raw).modulator.decimals == [1, 2, 3]


def test_paired_fields(tmp_path: Path) -> None:
    dataset = {**write_splits(tmp_path), "width": 16}
    with pytest.raises(ConfigInvalidError, match="width and height"):
        parse_config({"kind": "entropy_report", "dataset": dataset})


def test_mask_strategies_need_params(tmp_path: Path) -> None:
    raw = {
        "kind": "width_sweep",
        "dataset": write_splits(tmp_path),
        "mask": {"strategy": "A_central"},
    }
    with pytest.raises(ConfigInvalidError, match="needs at least one param"):
        parse_config(raw)
    raw["mask"] = {"strategy": "A_central", "params": [4, 6]}
    cfg = parse_config(raw)
    assert cfg.mask.strategy is MaskStrategy.A_CENTRAL
    assert cfg.mask.cells() == [4, 6]


def test_root_must_be_a_mapping() -> None:
    with pytest.raises(ConfigInvalidError, match="<root>"):
        parse_config(["not", "a", "mapping"])


def test_yaml_syntax_errors_carry_position(tmp_path: Path) -> None:
    path = tmp_path / "broken.yaml"
    path.write_text("kind: rate_sweep\ndataset: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigParseError) as excinfo:
        validate_config(path)
    assert excinfo.value.line >= 2
    assert excinfo.value.exit_code == 2


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigParseError, match="cannot read file"):
        validate_config(tmp_path / "absent.yaml")


def test_dumped_config_reparses(tmp_path: Path) -> None:
    cfg = parse_config(
        {
            "kind": "strength_sweep",
            "dataset": write_splits(tmp_path),
            "scatter": {"family": "monte_like", "strengths": [0.05, 0.8, 0.95]},
            "noise_snr_db": 20.0,
        }
    )
    again = parse_config(yaml.safe_load(dump_config(cfg)))
    assert again == cfg


def _manifest(**overrides: object) -> RunManifest:
    fields: dict[str, object] = {
        "experiment": "entropy_report",
        "config": {},
        "config_hash": "0" * 64,
        "seeds": {},
        **overrides,
    }
    return RunManifest.model_validate(fields)


def test_manifest_compatibility() -> None:
    check_compatibility(_manifest(), runtime="0.1.0")
    with pytest.raises(ConfigInvalidError, match="schema_version"):
        check_compatibility(_manifest(schema_version=99), runtime="0.1.0")
    with pytest.raises(ConfigInvalidError, match="surrogate_model_version"):
        check_compatibility(_manifest(surrogate_model_version="0"), runtime="0.1.0")
    with pytest.raises(ConfigInvalidError, match="min_runtime_version"):
        check_compatibility(_manifest(min_runtime_version="9.0"), runtime="0.1.0")
    check_compatibility(_manifest(), runtime="0.1.dev4+g1a2b3c")
    # Unparseable versions skip the minimum check.
    check_compatibility(_manifest(), runtime="dev+unknown")


def test_manifest_round_trip(tmp_path: Path) -> None:
    manifest = _manifest(outputs={"entropy_report.csv": "a" * 64})
    path = write_manifest(manifest, tmp_path)
    assert path.read_bytes().endswith(b"\n")
    assert read_manifest(tmp_path) == manifest
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigParseError):
        read_manifest(path)
