"""Declarative sweeps over the sensing pipeline and their run records."""

from __future__ import annotations

from .config import (
    DatasetSpec,
    ExperimentConfig,
    MaskSpec,
    ModulatorSpec,
    NistSpec,
    ScatterSpec,
    dump_config,
    load_yaml,
    parse_config,
    validate_config,
)
from .manifest import (
    RunManifest,
    check_compatibility,
    config_from_manifest,
    read_manifest,
    write_manifest,
)
from .runner import (
    RunResult,
    load_splits,
    resolve_output_dir,
    run_experiment,
    run_from_manifest,
    verify_outputs,
)

__all__ = [
    "DatasetSpec",
    "ExperimentConfig",
    "MaskSpec",
    "ModulatorSpec",
    "NistSpec",
    "RunManifest",
    "RunResult",
    "ScatterSpec",
    "check_compatibility",
    "config_from_manifest",
    "dump_config",
    "load_splits",
    "load_yaml",
    "parse_config",
    "read_manifest",
    "resolve_output_dir",
    "run_experiment",
    "run_from_manifest",
    "validate_config",
    "verify_outputs",
    "write_manifest",
]
