"""AdamW with decoupled weight decay, plus constant / exponential-decay
learning-rate schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autograd import Tensor


@dataclass(frozen=True)
class LrSchedule:
    """lr(t) = base_lr * decay_rate ** (t / decay_steps); constant when
    decay_rate is 1 or decay_steps is 0."""

    base_lr: float
    decay_rate: float = 1.0
    decay_steps: int = 0

    def lr(self, step: int) -> float:
        if self.decay_rate == 1.0 or self.decay_steps <= 0:
            return self.base_lr
        return self.base_lr * self.decay_rate ** (step / self.decay_steps)

    @classmethod
    def constant(cls, lr: float) -> "LrSchedule":
        return cls(base_lr=lr)

    @classmethod
    def exponential(cls, lr: float, decay_rate: float, decay_steps: int) -> "LrSchedule":
        return cls(base_lr=lr, decay_rate=decay_rate, decay_steps=decay_steps)


class AdamW:
    """Decoupled-weight-decay Adam over named parameter Tensors."""

    def __init__(self, params: list[tuple[str, Tensor]], schedule: LrSchedule,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                 weight_decay: float = 0.01):
        self.params = list(params)
        self.schedule = schedule
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.weight_decay = weight_decay
        self.step_count = 0
        self.m = {name: np.zeros_like(t.data) for name, t in self.params}
        self.v = {name: np.zeros_like(t.data) for name, t in self.params}

    def zero_grad(self) -> None:
        for _, t in self.params:
            t.grad = None

    def step(self) -> float:
        """Apply one update; returns the learning rate that was used."""
        lr = self.schedule.lr(self.step_count)
        self.step_count += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.step_count
        bc2 = 1.0 - b2 ** self.step_count
        for name, t in self.params:
            if t.grad is None:
                continue
            g = t.grad
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * (g * g)
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            if self.weight_decay:
                update = update + self.weight_decay * t.data
            t.data -= (lr * update).astype(t.data.dtype)
        return lr

    def state(self) -> dict:
        return {"step": self.step_count, "m": self.m, "v": self.v}

    def load_state(self, state: dict) -> None:
        self.step_count = int(state["step"])
        for name, _ in self.params:
            if name in state["m"]:
                self.m[name] = np.asarray(state["m"][name])
                self.v[name] = np.asarray(state["v"][name])
