"""Run manifests: everything needed to repeat a run to identical outputs."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any

import orjson
from packaging.version import InvalidVersion, Version
from pydantic import Field, ValidationError

from bijux_speckle.constants import (
    MANIFEST_MIN_RUNTIME,
    MANIFEST_SCHEMA_VERSION,
    SURROGATE_MODEL_VERSION,
)
from bijux_speckle.errors import ConfigInvalidError, ConfigParseError
from bijux_speckle.schema.base import TypedBaseModel
from bijux_speckle.utilities.io import atomic_write_bytes
from bijux_speckle.utilities.version import get_runtime_version

from .config import ExperimentConfig, parse_config

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"


class RunManifest(TypedBaseModel):
    """Written last in a run directory; its presence marks a complete run."""

    schema_version: int = MANIFEST_SCHEMA_VERSION
    runtime_version: str = Field(default_factory=get_runtime_version)
    min_runtime_version: str = MANIFEST_MIN_RUNTIME
    surrogate_model_version: str = SURROGATE_MODEL_VERSION
    experiment: str
    config: dict[str, Any]
    config_hash: str
    seeds: dict[str, Any]
    dataset: dict[str, Any] = Field(default_factory=dict)
    cells: list[dict[str, Any]] = Field(default_factory=list)
    outputs: dict[str, str] = Field(default_factory=dict)


def manifest_bytes(manifest: RunManifest) -> bytes:
    return orjson.dumps(
        manifest.model_dump(mode="json"),
        option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2 | orjson.OPT_APPEND_NEWLINE,
    )


def write_manifest(manifest: RunManifest, directory: str | Path) -> Path:
    return atomic_write_bytes(Path(directory) / MANIFEST_FILE, manifest_bytes(manifest))


def read_manifest(path: str | Path) -> RunManifest:
    source = Path(path)
    if source.is_dir():
        source = source / MANIFEST_FILE
    try:
        raw = orjson.loads(source.read_bytes())
    except OSError as exc:
        raise ConfigParseError(source, 0, 0, f"cannot read manifest: {exc}") from exc
    except orjson.JSONDecodeError as exc:
        raise ConfigParseError(source, exc.lineno, exc.colno, exc.msg) from exc
    try:
        manifest = RunManifest.model_validate(raw)
    except ValidationError as exc:
        raise ConfigInvalidError(
            [
                ".".join(str(part) for part in error["loc"]) + f": {error['msg']}"
                for error in exc.errors()
            ]
        ) from exc
    check_compatibility(manifest)
    return manifest


def _parse_version(text: str) -> Version | None:
    # Development builds (0.2.dev3+g1a2b) compare as the release they lead to.
    try:
        return Version(Version(text).base_version)
    except InvalidVersion:
        return None


def check_compatibility(manifest: RunManifest, runtime: str | None = None) -> None:
    """Reject manifests from a newer schema or a runtime below their minimum."""
    if manifest.schema_version > MANIFEST_SCHEMA_VERSION:
        raise ConfigInvalidError(
            [
                f"schema_version: {manifest.schema_version} is newer than "
                f"supported {MANIFEST_SCHEMA_VERSION}"
            ]
        )
    if manifest.surrogate_model_version != SURROGATE_MODEL_VERSION:
        raise ConfigInvalidError(
            [
                "surrogate_model_version: run used "
                f"{manifest.surrogate_model_version}, runtime has {SURROGATE_MODEL_VERSION}"
            ]
        )
    current = _parse_version(runtime or get_runtime_version())
    minimum = _parse_version(manifest.min_runtime_version)
    if current is None or minimum is None:
        logger.warning(
            "Runtime version not comparable; skipping minimum-version check",
            extra={"context": {"minimum": manifest.min_runtime_version}},
        )
        return
    if current < minimum:
        raise ConfigInvalidError(
            [f"min_runtime_version: runtime {current} is older than {minimum}"]
        )


def config_from_manifest(manifest: RunManifest) -> ExperimentConfig:
    return parse_config(manifest.config)
