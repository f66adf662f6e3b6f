"""Image-free semantic decoding from measurement vectors."""

from __future__ import annotations

from .config import TrainConfig
from .io import load_model, save_model
from .model import (
    DecoderModel,
    forward,
    init_model,
    logits,
    loss,
    loss_and_gradients,
    predict,
    softmax,
    zero_model,
)
from .training import (
    GradCheckResult,
    TrainResult,
    evaluate,
    export_pattern_bank,
    grad_check,
    train,
)

__all__ = [
    "DecoderModel",
    "GradCheckResult",
    "TrainConfig",
    "TrainResult",
    "evaluate",
    "export_pattern_bank",
    "forward",
    "grad_check",
    "init_model",
    "load_model",
    "logits",
    "loss",
    "loss_and_gradients",
    "predict",
    "save_model",
    "softmax",
    "train",
    "zero_model",
]
