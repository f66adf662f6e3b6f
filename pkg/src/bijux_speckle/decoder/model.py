"""Two-layer rectifier classifier over measurement vectors.

In end-to-end mode the pattern bank ``P`` (m x N_active) is the first
linear stage: an active-pixel image ``x`` becomes ``P @ (x / 255) / N_active``,
which is exactly the measurement of ``x`` divided by 255.
Features are then multiplied by a fixed per-feature ``scale`` (no shift, so
a zero input stays zero) before the hidden layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from bijux_speckle.enums import TrainMode
from bijux_speckle.errors import ShapeMismatchError
from bijux_speckle.utilities.rng import SplitMix64

Params = dict[str, NDArray[np.float64]]

GRAY_SCALE = 255.0


@dataclass
class DecoderModel:
    mode: TrainMode
    w1: NDArray[np.float64]
    b1: NDArray[np.float64]
    w2: NDArray[np.float64]
    b2: NDArray[np.float64]
    scale: NDArray[np.float64]
    patterns: NDArray[np.float64] | None = None
    trainable: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        names = ("w1", "b1", "w2", "b2")
        if self.mode is TrainMode.END_TO_END:
            if self.patterns is None:
                raise ShapeMismatchError("end-to-end model needs a pattern bank")
            names = ("patterns", *names)
        self.trainable = names

    @property
    def n_features(self) -> int:
        return int(self.w1.shape[1])

    @property
    def hidden(self) -> int:
        return int(self.w1.shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.w2.shape[0])

    @property
    def n_active(self) -> int:
        return 0 if self.patterns is None else int(self.patterns.shape[1])

    @property
    def input_dim(self) -> int:
        return self.n_active if self.mode is TrainMode.END_TO_END else self.n_features

    def params(self) -> Params:
        return {name: getattr(self, name) for name in self.trainable}

    def parameter_count(self) -> int:
        return sum(int(value.size) for value in self.params().values())

    def copy(self) -> DecoderModel:
        return DecoderModel(
            mode=self.mode,
            w1=self.w1.copy(),
            b1=self.b1.copy(),
            w2=self.w2.copy(),
            b2=self.b2.copy(),
            scale=self.scale.copy(),
            patterns=None if self.patterns is None else self.patterns.copy(),
        )

    def all_finite(self) -> bool:
        return all(bool(np.all(np.isfinite(value))) for value in self.params().values())


def init_model(
    n_features: int,
    num_classes: int,
    hidden: int,
    seed: int,
    *,
    mode: TrainMode = TrainMode.FIXED_PATTERNS,
    patterns: NDArray[np.floating] | None = None,
    scale: NDArray[np.floating] | None = None,
) -> DecoderModel:
    """He-initialized weights drawn from the shared generator; zero biases."""
    stream = SplitMix64(seed).spawn("decoder", "init")
    w1 = stream.spawn("w1").normal(hidden * n_features).reshape(hidden, n_features)
    w2 = stream.spawn("w2").normal(num_classes * hidden).reshape(num_classes, hidden)
    return DecoderModel(
        mode=mode,
        w1=w1 * np.sqrt(2.0 / n_features),
        b1=np.zeros(hidden),
        w2=w2 * np.sqrt(2.0 / hidden),
        b2=np.zeros(num_classes),
        scale=np.ones(n_features) if scale is None else np.asarray(scale, dtype=np.float64),
        patterns=None if patterns is None else np.array(patterns, dtype=np.float64),
    )


def zero_model(n_features: int, num_classes: int, hidden: int) -> DecoderModel:
    return DecoderModel(
        mode=TrainMode.FIXED_PATTERNS,
        w1=np.zeros((hidden, n_features)),
        b1=np.zeros(hidden),
        w2=np.zeros((num_classes, hidden)),
        b2=np.zeros(num_classes),
        scale=np.ones(n_features),
    )


def features(model: DecoderModel, inputs: NDArray[np.floating]) -> NDArray[np.float64]:
    """Unscaled features: measurements as given, or pattern-bank projections."""
    values = np.asarray(inputs, dtype=np.float64)
    if values.shape[-1] != model.input_dim:
        raise ShapeMismatchError(
            f"model expects inputs of length {model.input_dim}, got {values.shape[-1]}"
        )
    if model.mode is TrainMode.END_TO_END:
        assert model.patterns is not None
        return values @ model.patterns.T / (GRAY_SCALE * model.n_active)
    return values


def feature_scale(raw_features: NDArray[np.float64]) -> NDArray[np.float64]:
    """Reciprocal per-feature RMS over a training set (1 where the RMS is 0)."""
    rms = np.sqrt(np.mean(raw_features * raw_features, axis=0))
    return np.where(rms > 0.0, 1.0 / np.where(rms > 0.0, rms, 1.0), 1.0)


def softmax(logit_values: NDArray[np.float64]) -> NDArray[np.float64]:
    shifted = logit_values - logit_values.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class _Cache:
    inputs: NDArray[np.float64]
    scaled: NDArray[np.float64]
    pre_activation: NDArray[np.float64]
    hidden: NDArray[np.float64]


def _forward(
    model: DecoderModel, inputs: NDArray[np.floating]
) -> tuple[NDArray[np.float64], _Cache]:
    batch = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    scaled = features(model, batch) * model.scale
    pre = scaled @ model.w1.T + model.b1
    hidden = np.maximum(pre, 0.0)
    out = hidden @ model.w2.T + model.b2
    return out, _Cache(batch, scaled, pre, hidden)


def logits(model: DecoderModel, inputs: NDArray[np.floating]) -> NDArray[np.float64]:
    return _forward(model, inputs)[0]


def forward(model: DecoderModel, x: NDArray[np.floating]) -> NDArray[np.float64]:
    """Class probabilities for one input vector or a batch of them."""
    values = np.asarray(x, dtype=np.float64)
    probabilities = softmax(logits(model, values))
    return probabilities[0] if values.ndim == 1 else probabilities


def predict(model: DecoderModel, inputs: NDArray[np.floating]) -> NDArray[np.int64]:
    """Argmax class per input; ties go to the lowest class index."""
    return np.argmax(logits(model, inputs), axis=-1).astype(np.int64)


def cross_entropy(
    probabilities: NDArray[np.float64], labels: NDArray[np.integer]
) -> float:
    picked = probabilities[np.arange(labels.size), labels]
    return float(-np.mean(np.log(np.maximum(picked, np.finfo(np.float64).tiny))))


def loss(
    model: DecoderModel, inputs: NDArray[np.floating], labels: NDArray[np.integer]
) -> float:
    return cross_entropy(softmax(logits(model, inputs)), np.asarray(labels))


def loss_and_gradients(
    model: DecoderModel, inputs: NDArray[np.floating], labels: NDArray[np.integer]
) -> tuple[float, Params]:
    """Mean cross-entropy and its gradient for every trainable parameter."""
    out, cache = _forward(model, inputs)
    targets = np.asarray(labels, dtype=np.int64).reshape(-1)
    probabilities = softmax(out)
    batch = targets.size
    value = cross_entropy(probabilities, targets)
    d_out = probabilities
    d_out[np.arange(batch), targets] -= 1.0
    d_out /= batch
    grads: Params = {
        "w2": d_out.T @ cache.hidden,
        "b2": d_out.sum(axis=0),
    }
    d_pre = (d_out @ model.w2) * (cache.pre_activation > 0.0)
    grads["w1"] = d_pre.T @ cache.scaled
    grads["b1"] = d_pre.sum(axis=0)
    if model.mode is TrainMode.END_TO_END:
        d_features = (d_pre @ model.w1) * model.scale
        grads["patterns"] = d_features.T @ cache.inputs / (GRAY_SCALE * model.n_active)
    return value, grads
