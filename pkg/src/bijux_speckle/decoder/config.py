"""Training configuration for the measurement decoder."""

from __future__ import annotations

from pydantic import Field

from bijux_speckle.enums import OptimizerKind, TrainMode
from bijux_speckle.schema.base import TypedBaseModel


class TrainConfig(TypedBaseModel):
    """Minibatch training settings; Adam moments are fixed for reproducibility."""

    epochs: int = Field(default=30, ge=1)
    batch_size: int = Field(default=64, ge=1)
    learning_rate: float = Field(default=1e-3, gt=0.0)
    seed: int = Field(default=0, ge=0)
    optimizer: OptimizerKind = OptimizerKind.ADAM
    mode: TrainMode = TrainMode.FIXED_PATTERNS
    hidden: int = Field(default=256, ge=1)
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)
