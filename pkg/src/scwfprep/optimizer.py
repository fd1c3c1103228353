"""AdamW parameter updates and the training schedules.

The learning rate ramps linearly from lr_start to lr_end over the run (the
shape is configurable: constant and exponential are also supported); the
regularization weight decays by a fixed factor every ``eps_every``
iterations with no floor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class AdamWState:
    """Moment estimates and step counter; hyperparameters ride along."""

    step: int
    m: np.ndarray
    v: np.ndarray
    beta1: float = 0.9
    beta2: float = 0.999
    eps_adam: float = 1e-8
    weight_decay: float = 0.0

    @classmethod
    def zeros(cls, num_params: int, **hyper) -> "AdamWState":
        return cls(step=0, m=np.zeros(num_params), v=np.zeros(num_params), **hyper)


def adamw_step(
    state: AdamWState, theta: np.ndarray, grad: np.ndarray, lr: float
) -> tuple[AdamWState, np.ndarray]:
    """One decoupled-weight-decay Adam update; pure, returns new values.

    m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2
    theta <- theta - lr * mhat / (sqrt(vhat) + eps_adam) - lr * wd * theta

    with mhat, vhat the bias-corrected moments at the new step count.
    """
    theta = np.asarray(theta, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if theta.shape != grad.shape or theta.shape != state.m.shape:
        raise ValueError(
            f"shape mismatch: theta {theta.shape}, grad {grad.shape}, "
            f"moments {state.m.shape}"
        )
    t = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    mhat = m / (1.0 - state.beta1**t)
    vhat = v / (1.0 - state.beta2**t)
    new_theta = theta - lr * mhat / (np.sqrt(vhat) + state.eps_adam)
    if state.weight_decay != 0.0:
        new_theta = new_theta - lr * state.weight_decay * theta
    return replace(state, step=t, m=m, v=v), new_theta


@dataclass(frozen=True)
class Schedule:
    """Learning-rate ramp and stepped regularization decay."""

    lr_start: float = 0.03
    lr_end: float = 0.015
    total_iters: int = 10000
    eps_start: float = 1.0
    eps_decay: float = 0.7
    eps_every: int = 1000
    lr_shape: str = "linear"

    def __post_init__(self):
        if self.total_iters < 1:
            raise ValueError(f"total_iters must be >= 1, got {self.total_iters}")
        if self.eps_every < 1:
            raise ValueError(f"eps_every must be >= 1, got {self.eps_every}")
        if self.lr_shape not in ("linear", "constant", "exponential"):
            raise ValueError(f"unknown lr shape {self.lr_shape!r}")

    def lr_at(self, t: int) -> float:
        if not 0 <= t <= self.total_iters:
            raise ValueError(f"iteration {t} outside [0, {self.total_iters}]")
        if self.lr_shape == "constant":
            return self.lr_start
        frac = t / self.total_iters
        if self.lr_shape == "exponential":
            return self.lr_start * (self.lr_end / self.lr_start) ** frac
        return self.lr_start + (self.lr_end - self.lr_start) * frac

    def eps_at(self, t: int) -> float:
        if t < 0:
            raise ValueError(f"iteration must be nonnegative, got {t}")
        return self.eps_start * self.eps_decay ** (t // self.eps_every)
