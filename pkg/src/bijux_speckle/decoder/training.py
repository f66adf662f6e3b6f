"""Training, evaluation and gradient checking of decoder models."""

from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.enums import TrainMode
from bijux_speckle.errors import (
    BadParamsError,
    EmptyDatasetError,
    NonFiniteLossError,
    ShapeMismatchError,
)
from bijux_speckle.patterns.mask import FovMask
from bijux_speckle.patterns.pattern_set import PatternSet, learned_pattern_set
from bijux_speckle.utilities.rng import SplitMix64

from .config import TrainConfig
from .model import (
    DecoderModel,
    feature_scale,
    features,
    init_model,
    loss,
    loss_and_gradients,
    predict,
)
from .optim import make_optimizer

logger = logging.getLogger(__name__)

GRAD_CHECK_STEP = 1e-5
GRAD_CHECK_MIN_PARAMS = 200
GRAD_CHECK_MAX_MODEL = 100_000


@dataclass
class TrainResult:
    model: DecoderModel
    losses: list[float] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.losses[-1]


def _validate(
    inputs: NDArray[np.float64], labels: NDArray[np.int64], num_classes: int
) -> None:
    if inputs.ndim != 2:
        raise ShapeMismatchError(f"inputs must be (count, features), got {inputs.shape}")
    if inputs.shape[0] != labels.shape[0]:
        raise ShapeMismatchError(
            f"{inputs.shape[0]} inputs but {labels.shape[0]} labels"
        )
    if inputs.shape[0] == 0:
        raise EmptyDatasetError("cannot train on an empty set")
    if labels.min() < 0 or labels.max() >= num_classes:
        raise ShapeMismatchError(f"labels must lie in [0, {num_classes - 1}]")


def train(
    inputs: NDArray[np.floating],
    labels: NDArray[np.integer],
    cfg: TrainConfig,
    *,
    num_classes: int = 10,
    pattern_bank: NDArray[np.floating] | None = None,
) -> TrainResult:
    """Minibatch descent on cross-entropy.

    ``inputs`` are measurement vectors in fixed-pattern mode and active-pixel
    images in end-to-end mode, where ``pattern_bank`` seeds the first layer.
    Shuffling uses one permutation per epoch from the config seed.
    """
    data = np.asarray(inputs, dtype=np.float64)
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    _validate(data, targets, num_classes)
    end_to_end = cfg.mode is TrainMode.END_TO_END
    if end_to_end and pattern_bank is None:
        raise BadParamsError("end-to-end training needs an initial pattern bank")
    bank = None if pattern_bank is None else np.asarray(pattern_bank, dtype=np.float64)
    n_features = bank.shape[0] if end_to_end and bank is not None else data.shape[1]
    model = init_model(
        n_features,
        num_classes,
        cfg.hidden,
        cfg.seed,
        mode=cfg.mode,
        patterns=bank if end_to_end else None,
    )
    model.scale = feature_scale(features(model, data))
    optimizer = make_optimizer(cfg)
    shuffle = SplitMix64(cfg.seed).spawn("decoder", "shuffle")
    count = data.shape[0]
    result = TrainResult(model)
    for epoch in range(cfg.epochs):
        order = shuffle.permutation(count)
        total = 0.0
        for start in range(0, count, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            value, grads = loss_and_gradients(model, data[batch], targets[batch])
            if not math.isfinite(value):
                raise NonFiniteLossError(epoch, value)
            total += value * batch.size
            optimizer.step(model.params(), grads)
        if not model.all_finite():
            raise NonFiniteLossError(epoch, float("nan"))
        epoch_loss = total / count
        result.losses.append(epoch_loss)
        logger.debug(
            "Epoch finished",
            extra={"context": {"epoch": epoch, "loss": epoch_loss, "mode": cfg.mode.value}},
        )
    logger.info(
        "Training finished",
        extra={
            "context": {
                "epochs": cfg.epochs,
                "final_loss": result.final_loss,
                "parameters": model.parameter_count(),
            }
        },
    )
    return result


def evaluate(
    model: DecoderModel, inputs: NDArray[np.floating], labels: NDArray[np.integer]
) -> float:
    """Fraction of argmax predictions equal to ``labels``."""
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    if targets.size == 0:
        raise EmptyDatasetError("cannot evaluate on an empty set")
    predictions = predict(model, np.atleast_2d(np.asarray(inputs, dtype=np.float64)))
    if predictions.shape[0] != targets.shape[0]:
        raise ShapeMismatchError(
            f"{predictions.shape[0]} inputs but {targets.shape[0]} labels"
        )
    return float(np.mean(predictions == targets))


@dataclass(frozen=True)
class GradCheckResult:
    max_relative_error: float
    checked: int
    per_parameter: dict[str, float]


def _relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-6)


def grad_check(
    model: DecoderModel,
    inputs: NDArray[np.floating],
    labels: NDArray[np.integer],
    *,
    min_params: int = GRAD_CHECK_MIN_PARAMS,
    step: float = GRAD_CHECK_STEP,
    seed: int = 0,
) -> GradCheckResult:
    """Compare backprop with central differences on sampled parameters.

    Each parameter array contributes in proportion to its size (at least 20
    entries, or all of them) so that at least ``min_params`` entries are
    checked overall.
    """
    if model.parameter_count() >= GRAD_CHECK_MAX_MODEL:
        raise BadParamsError(
            f"gradient check needs fewer than {GRAD_CHECK_MAX_MODEL} parameters"
        )
    trial = model.copy()
    batch = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    _, grads = loss_and_gradients(trial, batch, targets)
    params = trial.params()
    total = sum(value.size for value in params.values())
    stream = SplitMix64(seed).spawn("gradcheck")
    per_parameter: dict[str, float] = {}
    checked = 0
    for name, value in params.items():
        wanted = max(math.ceil(min_params * value.size / total), 20)
        picks = stream.spawn(name).permutation(value.size)[: min(value.size, wanted)]
        flat = value.reshape(-1)
        worst = 0.0
        for index in picks:
            original = flat[index]
            flat[index] = original + step
            plus = loss(trial, batch, targets)
            flat[index] = original - step
            minus = loss(trial, batch, targets)
            flat[index] = original
            numeric = (plus - minus) / (2.0 * step)
            analytic = float(grads[name].reshape(-1)[index])
            worst = max(worst, _relative_error(analytic, numeric))
        per_parameter[name] = worst
        checked += int(picks.size)
    result = GradCheckResult(
        max_relative_error=max(per_parameter.values()),
        checked=checked,
        per_parameter=per_parameter,
    )
    logger.info(
        "Gradient check",
        extra={
            "context": {
                "max_relative_error": result.max_relative_error,
                "checked": checked,
            }
        },
    )
    return result


def export_pattern_bank(model: DecoderModel, mask: FovMask, seed: int) -> PatternSet:
    """Learned patterns of an end-to-end model, clipped to transmissions in [0, 1]."""
    if model.mode is not TrainMode.END_TO_END or model.patterns is None:
        raise BadParamsError("only end-to-end models carry a learned pattern bank")
    if model.n_active != mask.n_active:
        raise ShapeMismatchError(
            f"model has {model.n_active} active pixels, mask has {mask.n_active}"
        )
    return learned_pattern_set(np.clip(model.patterns, 0.0, 1.0), mask, seed)
