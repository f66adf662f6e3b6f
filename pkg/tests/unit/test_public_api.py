"""Guard the package facades against accidental export changes."""

from __future__ import annotations

import importlib

import pytest

FACADES = (
    "bijux_speckle",
    "bijux_speckle.datasets",
    "bijux_speckle.scattering",
    "bijux_speckle.patterns",
    "bijux_speckle.measurement",
    "bijux_speckle.entropy",
    "bijux_speckle.decoder",
    "bijux_speckle.nist",
    "bijux_speckle.experiments",
)

CRITICAL_EXPORTS = {
    "bijux_speckle.datasets": ("LabeledDataset", "load_idx", "resize_nearest", "read_pgm"),
    "bijux_speckle.scattering": ("ScatterConfig", "build_operator", "scatter"),
    "bijux_speckle.patterns": ("hadamard_matrix", "make_mask", "build_hadamard_patterns"),
    "bijux_speckle.measurement": ("measure", "measure_dataset"),
    "bijux_speckle.entropy": ("image_entropy", "dataset_entropy"),
    "bijux_speckle.decoder": ("init_model", "forward", "train", "grad_check"),
    "bijux_speckle.nist": ("quantize", "run_battery", "battery_table_text"),
    "bijux_speckle.experiments": ("validate_config", "run_experiment", "run_from_manifest"),
}


@pytest.mark.parametrize("module_name", FACADES)
def test_all_entries_resolve(module_name: str) -> None:
    module = importlib.import_module(module_name)
    exports = tuple(getattr(module, "__all__", ()))
    assert exports, f"{module_name} has no __all__"
    assert len(set(exports)) == len(exports)
    missing = [name for name in exports if not hasattr(module, name)]
    assert not missing, f"{module_name} exports undefined names: {missing}"


def test_critical_exports_present() -> None:
    for module_name, names in CRITICAL_EXPORTS.items():
        exports = importlib.import_module(module_name).__all__
        for name in names:
            assert name in exports, f"{name} missing from {module_name}"
