"""Gradient-descent optimizers updating parameters in place."""

from __future__ import annotations

from typing import Protocol

import numpy as np

from bijux_speckle.enums import OptimizerKind

from .config import TrainConfig
from .model import Params


class Optimizer(Protocol):
    def step(self, params: Params, grads: Params) -> None: ...


class Sgd:
    def __init__(self, learning_rate: float) -> None:
        self.learning_rate = learning_rate

    def step(self, params: Params, grads: Params) -> None:
        for name, value in params.items():
            value -= self.learning_rate * grads[name]


class Adam:
    """Adam with bias-corrected moments."""

    def __init__(
        self, learning_rate: float, beta1: float, beta2: float, eps: float
    ) -> None:
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m: Params = {}
        self._v: Params = {}

    def step(self, params: Params, grads: Params) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for name, value in params.items():
            grad = grads[name]
            m = self._m.setdefault(name, np.zeros_like(value))
            v = self._v.setdefault(name, np.zeros_like(value))
            m *= self.beta1
            m += (1.0 - self.beta1) * grad
            v *= self.beta2
            v += (1.0 - self.beta2) * grad * grad
            value -= self.learning_rate * (m / correction1) / (
                np.sqrt(v / correction2) + self.eps
            )


def make_optimizer(cfg: TrainConfig) -> Optimizer:
    if cfg.optimizer is OptimizerKind.SGD:
        return Sgd(cfg.learning_rate)
    return Adam(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
