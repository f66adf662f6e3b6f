"""Declarative experiment configuration loaded from YAML.

Relative dataset paths are resolved against the directory of the config
file, so a normalized config only carries absolute paths.
"""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any

from pydantic import (
    Field,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)
import yaml

from bijux_speckle.decoder.config import TrainConfig
from bijux_speckle.enums import (
    ExperimentKind,
    MaskStrategy,
    QuantizationScheme,
    ScatterFamily,
)
from bijux_speckle.errors import ConfigInvalidError, ConfigParseError
from bijux_speckle.schema.base import TypedBaseModel
from bijux_speckle.scattering.config import MAX_SEED, ScatterConfig

SamplingRate = Annotated[float, Field(gt=0.0, le=1.0)]
Strength = Annotated[float, Field(ge=0.0, le=1.0)]
Seed = Annotated[int, Field(ge=0, le=MAX_SEED)]
MaskParam = Annotated[int, Field(ge=1)]

ACCURACY_KINDS = frozenset(
    {
        ExperimentKind.RATE_SWEEP,
        ExperimentKind.WIDTH_SWEEP,
        ExperimentKind.STRENGTH_SWEEP,
        ExperimentKind.E2E_COMPARE,
        ExperimentKind.MODULATOR_COMPARE,
    }
)


def _resolve_existing(value: Path | None, info: ValidationInfo) -> Path | None:
    if value is None:
        return None
    base = (info.context or {}).get("base_dir")
    path = value if value.is_absolute() or base is None else Path(base) / value
    if not path.is_file():
        raise ValueError(f"file does not exist: {path}")
    return path.resolve()


class DatasetSpec(TypedBaseModel):
    """IDX sources plus the resize and subset applied after loading."""

    train_images: Path
    train_labels: Path
    test_images: Path | None = None
    test_labels: Path | None = None
    num_classes: int = Field(default=10, ge=2)
    width: int | None = Field(default=None, ge=1)
    height: int | None = Field(default=None, ge=1)
    train_size: int | None = Field(default=None, ge=1)
    test_size: int | None = Field(default=None, ge=1)
    subset_seed: Seed = 0

    @field_validator("train_images", "train_labels", "test_images", "test_labels")
    @classmethod
    def _existing_files(cls, value: Path | None, info: ValidationInfo) -> Path | None:
        return _resolve_existing(value, info)

    @model_validator(mode="after")
    def _pairs(self) -> DatasetSpec:
        if (self.width is None) != (self.height is None):
            raise ValueError("width and height must be given together")
        if (self.test_images is None) != (self.test_labels is None):
            raise ValueError("test_images and test_labels must be given together")
        return self

    @property
    def has_test_split(self) -> bool:
        return self.test_images is not None


class ScatterSpec(TypedBaseModel):
    family: ScatterFamily = ScatterFamily.SCATNET_LIKE
    strengths: list[Strength] = Field(default_factory=lambda: [0.0], min_length=1)
    seed: Seed = 0
    kernel_max_radius: int | None = Field(default=None, ge=1)

    def config_for(self, strength: float) -> ScatterConfig:
        return ScatterConfig(
            family=self.family,
            strength=strength,
            seed=self.seed,
            kernel_max_radius=self.kernel_max_radius,
        )


class MaskSpec(TypedBaseModel):
    """Field-of-view strategy; ``params`` are side lengths or row/column counts."""

    strategy: MaskStrategy = MaskStrategy.FULL
    params: list[MaskParam] = Field(default_factory=list)

    @model_validator(mode="after")
    def _params_for_strategy(self) -> MaskSpec:
        if self.strategy is not MaskStrategy.FULL and not self.params:
            raise ValueError(f"strategy {self.strategy.value} needs at least one param")
        return self

    def cells(self) -> list[int | None]:
        if self.strategy is MaskStrategy.FULL:
            return [None]
        return list(self.params)


class NistSpec(TypedBaseModel):
    """Ciphertext conditions: one image upsampled to the field, every strength and rate."""

    quantization: QuantizationScheme = QuantizationScheme.AFFINE16
    include_extended: bool = False
    image_index: int = Field(default=0, ge=0)
    field_width: int = Field(default=1000, ge=2)
    field_height: int = Field(default=1000, ge=2)
    plaintext: bool = True


class ModulatorSpec(TypedBaseModel):
    """Decimal places kept in the gray patterns that stand in for the medium."""

    decimals: list[Annotated[int, Field(ge=0, le=6)]] = Field(
        default_factory=lambda: [1, 2, 3], min_length=1
    )


class ExperimentConfig(TypedBaseModel):
    kind: ExperimentKind
    name: str = Field(default="experiment", min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    dataset: DatasetSpec
    scatter: ScatterSpec = Field(default_factory=ScatterSpec)
    mask: MaskSpec = Field(default_factory=MaskSpec)
    rates: list[SamplingRate] = Field(default_factory=lambda: [0.1], min_length=1)
    decoder: TrainConfig = Field(default_factory=TrainConfig)
    noise_snr_db: float | None = None
    seeds: list[Seed] = Field(default_factory=lambda: [0], min_length=1)
    workers: int = Field(default=1, ge=1)
    output_dir: Path | None = None
    nist: NistSpec = Field(default_factory=NistSpec)
    modulator: ModulatorSpec = Field(default_factory=ModulatorSpec)

    @model_validator(mode="after")
    def _kind_requirements(self) -> ExperimentConfig:
        if self.kind in ACCURACY_KINDS and not self.dataset.has_test_split:
            raise ValueError(f"{self.kind.value} needs dataset.test_images and test_labels")
        return self


def _format_error(error: Any) -> str:
    location = ".".join(str(part) for part in error["loc"]) or "<root>"
    return f"{location}: {error['msg']}"


def parse_config(
    raw: Any, *, base_dir: str | Path | None = None
) -> ExperimentConfig:
    """Validate a mapping, listing every violation with its field path."""
    if not isinstance(raw, dict):
        raise ConfigInvalidError(
            [f"<root>: expected a mapping, got {type(raw).__name__}"]
        )
    try:
        return ExperimentConfig.model_validate(
            raw, context={"base_dir": None if base_dir is None else Path(base_dir)}
        )
    except ValidationError as exc:
        raise ConfigInvalidError([_format_error(error) for error in exc.errors()]) from exc


def load_yaml(path: str | Path) -> Any:
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(source, 0, 0, f"cannot read file: {exc}") from exc
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else 0
        column = mark.column + 1 if mark is not None else 0
        raise ConfigParseError(source, line, column, str(exc.problem)) from exc
    except yaml.YAMLError as exc:
        raise ConfigParseError(source, 0, 0, str(exc)) from exc


def validate_config(path: str | Path) -> ExperimentConfig:
    """Parse, default and validate the YAML file at ``path``."""
    source = Path(path)
    return parse_config(load_yaml(source), base_dir=source.resolve().parent)


def config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    return cfg.model_dump(mode="json")


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
