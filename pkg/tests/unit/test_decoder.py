from __future__ import annotations

from dataclasses import replace
import math
from pathlib import Path

import numpy as np
import pytest
from tests.utils.synthetic import stroke_dataset

from bijux_speckle.decoder import (
    TrainConfig,
    evaluate,
    export_pattern_bank,
    forward,
    grad_check,
    init_model,
    load_model,
    loss,
    predict,
    save_model,
    softmax,
    train,
    zero_model,
)
from bijux_speckle.enums import OptimizerKind, PatternKind, TrainMode
from bijux_speckle.errors import (
    BadParamsError,
    EmptyDatasetError,
    NonFiniteLossError,
    ShapeMismatchError,
)
from bijux_speckle.measurement import measure_dataset, stack_values
from bijux_speckle.patterns import build_hadamard_patterns, make_mask


def _measured(count: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    dataset = stroke_dataset(count, size=16, seed=seed)
    ps = build_hadamard_patterns(16, 16, make_mask("full", 16, 16), 0.25, seed=1)
    return stack_values(measure_dataset(dataset, ps)), dataset.labels


def test_zero_model_is_uniform() -> None:
    model = zero_model(5, 10, 4)
    probabilities = forward(model, np.arange(5.0))
    assert np.allclose(probabilities, 0.1)
    assert loss(model, np.ones((3, 5)), np.array([0, 4, 9])) == pytest.approx(math.log(10))
    assert predict(model, np.ones((2, 5))).tolist() == [0, 0]


def test_softmax_is_stable() -> None:
    out = softmax(np.array([[1000.0, 1000.0], [-1000.0, 0.0]]))
    assert np.allclose(out.sum(axis=1), 1.0)
    assert np.allclose(out[0], [0.5, 0.5])


def test_input_length_is_checked() -> None:
    with pytest.raises(ShapeMismatchError):
        forward(zero_model(5, 10, 4), np.ones(6))


def test_fixed_pattern_gradients() -> None:
    rng = np.random.default_rng(0)
    model = init_model(8, 4, 6, seed=3)
    result = grad_check(model, rng.normal(size=(5, 8)), np.array([0, 1, 2, 3, 1]))
    assert result.max_relative_error < 1e-4
    assert result.checked == model.parameter_count()


def test_end_to_end_gradients() -> None:
    rng = np.random.default_rng(1)
    bank = rng.uniform(size=(4, 16))
    model = init_model(4, 3, 5, seed=2, mode=TrainMode.END_TO_END, patterns=bank)
    inputs = rng.uniform(0.0, 255.0, size=(6, 16))
    result = grad_check(model, inputs, np.array([0, 1, 2, 0, 1, 2]))
    assert "patterns" in result.per_parameter
    assert result.max_relative_error < 1e-4


def test_grad_check_refuses_large_models() -> None:
    with pytest.raises(BadParamsError):
        grad_check(zero_model(400, 10, 256), np.ones((1, 400)), np.array([0]))


def test_training_learns_and_is_reproducible() -> None:
    inputs, labels = _measured(200)
    cfg = TrainConfig(epochs=40, batch_size=16, learning_rate=1e-2, hidden=32, seed=5)
    first = train(inputs, labels, cfg)
    second = train(inputs, labels, cfg)
    assert first.losses == second.losses
    assert np.array_equal(first.model.w1, second.model.w1)
    assert first.final_loss < first.losses[0]
    assert evaluate(first.model, inputs, labels) > 0.6


def test_sgd_training_reduces_loss() -> None:
    inputs, labels = _measured(100, seed=2)
    cfg = TrainConfig(
        epochs=20, batch_size=10, learning_rate=0.05, hidden=16, optimizer=OptimizerKind.SGD
    )
    result = train(inputs, labels, cfg)
    assert result.final_loss < result.losses[0]


def test_non_finite_loss_is_reported() -> None:
    inputs, labels = _measured(20)
    inputs[0, 0] = np.nan
    cfg = TrainConfig(epochs=3)
    with np.errstate(all="ignore"), pytest.raises(NonFiniteLossError):
        train(inputs, labels, cfg)


def test_training_validates_inputs() -> None:
    cfg = TrainConfig(epochs=1)
    with pytest.raises(EmptyDatasetError):
        train(np.zeros((0, 3)), np.zeros(0, dtype=np.int64), cfg)
    with pytest.raises(ShapeMismatchError):
        train(np.zeros((2, 3)), np.array([0, 10]), cfg)
    with pytest.raises(BadParamsError):
        train(np.zeros((2, 3)), np.array([0, 1]), cfg.model_copy(update={"mode": TrainMode.END_TO_END}))


def test_end_to_end_training_updates_patterns() -> None:
    dataset = stroke_dataset(60, size=8, seed=3)
    mask = make_mask("full", 8, 8)
    bank = build_hadamard_patterns(8, 8, mask, 0.25, seed=0).matrix
    inputs = dataset.pixels.reshape(60, -1).astype(np.float64)
    cfg = TrainConfig(epochs=5, batch_size=12, learning_rate=1e-2, hidden=8, mode=TrainMode.END_TO_END)
    result = train(inputs, dataset.labels, cfg, pattern_bank=bank)
    assert result.model.patterns is not None
    assert not np.array_equal(result.model.patterns, bank)
    exported = export_pattern_bank(result.model, mask, seed=0)
    assert exported.kind is PatternKind.LEARNED
    assert exported.m == bank.shape[0]
    assert exported.matrix.min() >= 0.0
    assert exported.matrix.max() <= 1.0
    with pytest.raises(ShapeMismatchError):
        export_pattern_bank(result.model, make_mask("full", 4, 4), seed=0)


def test_fixed_models_have_no_pattern_bank() -> None:
    with pytest.raises(BadParamsError):
        export_pattern_bank(zero_model(4, 10, 2), make_mask("full", 2, 2), seed=0)


@pytest.mark.parametrize("mode", list(TrainMode))
def test_model_file_round_trip(mode: TrainMode, tmp_path: Path) -> None:
    bank = np.linspace(0.0, 1.0, 3 * 9).reshape(3, 9) if mode is TrainMode.END_TO_END else None
    model = init_model(3, 4, 5, seed=8, mode=mode, patterns=bank, scale=np.array([1.0, 2.0, 3.0]))
    loaded = load_model(save_model(model, tmp_path / "decoder.bin"))
    assert loaded.mode is mode
    for name in ("w1", "b1", "w2", "b2", "scale"):
        assert np.array_equal(getattr(loaded, name), getattr(model, name))
    if bank is not None:
        assert loaded.patterns is not None
        assert np.array_equal(loaded.patterns, bank)
    else:
        assert loaded.patterns is None


def test_small_set_is_memorized() -> None:
    inputs, labels = _measured(32, seed=7)
    cfg = TrainConfig(epochs=200, batch_size=8, learning_rate=1e-2, hidden=256, seed=1)
    result = train(inputs, labels, cfg)
    assert result.final_loss < 0.01
    assert evaluate(result.model, inputs, labels) == 1.0


def test_shifting_every_logit_keeps_the_prediction() -> None:
    inputs, _ = _measured(12, seed=4)
    model = init_model(inputs.shape[1], 10, 16, seed=6)
    shifted = replace(model, b2=model.b2 + 7.5)
    assert np.array_equal(predict(shifted, inputs), predict(model, inputs))
    assert np.allclose(forward(shifted, inputs), forward(model, inputs))
