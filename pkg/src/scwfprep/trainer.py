"""Training loop: forward -> loss -> gradient -> AdamW, with schedules.

A run is fully determined by its TrainConfig (including the seed), so two
runs with the same config produce byte-identical traces. The run-directory
writer emits config.json, trace.csv, theta.json, field.csv, velocity.csv,
and report.json.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import exprparse
from .ansatz import CircuitSpec, build_spec, save_theta
from .diffprog import evaluate_loss
from .field import (
    VelocityField,
    WaveField,
    add_noise,
    relative_error,
    write_velocity_csv,
    write_wave_csv,
)
from .grid import Grid
from .optimizer import AdamWState, Schedule, adamw_step

THETA_INIT_SCALE = 0.1  # uniform init range; near-identity keeps early gradients alive


class DivergenceError(RuntimeError):
    """Loss became non-finite during training."""


@dataclass
class TrainConfig:
    dim: int
    N: int
    qubits: int
    groups: int
    hbar: float
    target: tuple[str, ...]
    iters: int
    lr_start: float = 0.03
    lr_end: float = 0.015
    eps_start: float = 1.0
    eps_decay: float = 0.7
    eps_every: int = 1000
    seed: int = 42
    weight_decay: float = 0.0
    noise_lambda: float = 0.0
    trace_every: int = 100
    lr_shape: str = "linear"

    def __post_init__(self):
        self.target = tuple(self.target)
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if self.N < 2 or (self.N & (self.N - 1)) != 0:
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")
        if self.qubits < 2:
            raise ValueError(f"qubits must be >= 2, got {self.qubits}")
        if 2 ** (self.qubits - 1) != self.N**self.dim:
            raise ValueError(
                f"qubit count {self.qubits} does not match the grid: "
                f"need 2^(n-1) = N^d = {self.N**self.dim}"
            )
        if self.groups < 1:
            raise ValueError(f"groups must be >= 1, got {self.groups}")
        if self.hbar <= 0:
            raise ValueError(f"hbar must be positive, got {self.hbar}")
        if len(self.target) != self.dim:
            raise ValueError(
                f"need one target expression per dimension: "
                f"got {len(self.target)} for dim {self.dim}"
            )
        if self.iters < 1:
            raise ValueError(f"iters must be >= 1, got {self.iters}")
        if self.trace_every < 1:
            raise ValueError(f"trace_every must be >= 1, got {self.trace_every}")
        if self.noise_lambda < 0:
            raise ValueError(f"noise_lambda must be >= 0, got {self.noise_lambda}")

    REQUIRED_KEYS = (
        "dim", "N", "qubits", "groups", "hbar", "target", "iters",
        "lr_start", "lr_end", "eps_start", "eps_decay", "eps_every",
        "seed", "weight_decay", "noise_lambda", "trace_every",
    )
    OPTIONAL_KEYS = ("lr_shape",)

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        missing = [k for k in cls.REQUIRED_KEYS if k not in data]
        if missing:
            raise ValueError(f"config is missing keys: {missing}")
        unknown = [k for k in data if k not in cls.REQUIRED_KEYS + cls.OPTIONAL_KEYS]
        if unknown:
            raise ValueError(f"config has unknown keys: {unknown}")
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["target"] = list(self.target)
        return d

    def grid(self) -> Grid:
        return Grid(self.dim, self.N)

    def circuit(self) -> CircuitSpec:
        return build_spec(self.qubits, self.groups)

    def schedule(self) -> Schedule:
        return Schedule(
            lr_start=self.lr_start,
            lr_end=self.lr_end,
            total_iters=self.iters,
            eps_start=self.eps_start,
            eps_decay=self.eps_decay,
            eps_every=self.eps_every,
            lr_shape=self.lr_shape,
        )


class TracePoint(NamedTuple):
    iteration: int
    loss: float
    rel_error: float
    lr: float
    eps: float


@dataclass
class TrainReport:
    trace: list[TracePoint]
    final_theta: np.ndarray
    final_wave: WaveField
    final_velocity: VelocityField
    final_error: float
    final_loss: float  # at the scheduled eps of the last iteration
    final_loss_fidelity: float  # at eps = 0, comparable across runs
    wall_time: float


def build_targets(config: TrainConfig) -> tuple[VelocityField, VelocityField]:
    """Clean and training targets; they differ only when noise is requested.

    Errors are always reported against the clean target. The noise stream is
    seeded with seed + 1 to keep it distinct from the theta-init stream.
    """
    grid = config.grid()
    columns = []
    for text in config.target:
        expr = exprparse.parse(text)
        columns.append(exprparse.eval_on_grid(expr, grid))
    clean = VelocityField(grid, np.column_stack(columns))
    if config.noise_lambda > 0.0:
        return clean, add_noise(clean, config.noise_lambda, config.seed + 1)
    return clean, clean


def initial_theta(config: TrainConfig, spec: CircuitSpec) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    return rng.uniform(-THETA_INIT_SCALE, THETA_INIT_SCALE, size=spec.num_params)


def train(config: TrainConfig) -> TrainReport:
    """Run the full optimization loop and return traces and final fields."""
    started = time.perf_counter()
    grid = config.grid()
    spec = config.circuit()
    sched = config.schedule()
    clean_target, train_target = build_targets(config)
    theta = initial_theta(config, spec)
    state = AdamWState.zeros(spec.num_params, weight_decay=config.weight_decay)

    trace: list[TracePoint] = []

    def record(iteration: int, loss: float, velocity: np.ndarray, lr: float, eps: float):
        rel = relative_error(VelocityField(grid, velocity), clean_target)
        trace.append(TracePoint(iteration, loss, rel, lr, eps))

    for k in range(config.iters):
        lr = sched.lr_at(k)
        eps = sched.eps_at(k)
        out = evaluate_loss(spec, theta, train_target, config.hbar, eps)
        if not np.isfinite(out.loss):
            raise DivergenceError(
                f"loss became non-finite at iteration {k}: {out.loss}"
            )
        if k % config.trace_every == 0:
            record(k, out.loss, out.velocity, lr, eps)
        state, theta = adamw_step(state, theta, out.grad, lr)

    lr_end = sched.lr_at(config.iters)
    eps_end = sched.eps_at(config.iters)
    final = evaluate_loss(spec, theta, train_target, config.hbar, eps_end, want_grad=False)
    if not np.isfinite(final.loss):
        raise DivergenceError(f"final loss is non-finite: {final.loss}")
    record(config.iters, final.loss, final.velocity, lr_end, eps_end)
    fidelity = evaluate_loss(
        spec, theta, train_target, config.hbar, 0.0, want_grad=False
    ).loss

    wave = WaveField(grid, final.spinors)
    velocity = VelocityField(grid, final.velocity)
    return TrainReport(
        trace=trace,
        final_theta=theta,
        final_wave=wave,
        final_velocity=velocity,
        final_error=trace[-1].rel_error,
        final_loss=final.loss,
        final_loss_fidelity=fidelity,
        wall_time=time.perf_counter() - started,
    )


class EvalResult(NamedTuple):
    loss: float
    rel_error: float
    wave: WaveField
    velocity: VelocityField


def evaluate(theta, config: TrainConfig) -> EvalResult:
    """Single forward pass; the reported loss is the eps = 0 fidelity loss."""
    grid = config.grid()
    spec = config.circuit()
    clean_target, _ = build_targets(config)
    out = evaluate_loss(spec, theta, clean_target, config.hbar, 0.0, want_grad=False)
    velocity = VelocityField(grid, out.velocity)
    return EvalResult(
        loss=out.loss,
        rel_error=relative_error(velocity, clean_target),
        wave=WaveField(grid, out.spinors),
        velocity=velocity,
    )


def write_trace_csv(trace: list[TracePoint], path) -> None:
    with open(path, "w") as f:
        f.write("iter,loss,rel_error,lr,eps\n")
        for p in trace:
            f.write(
                "%d,%.17g,%.17g,%.17g,%.17g\n"
                % (p.iteration, p.loss, p.rel_error, p.lr, p.eps)
            )


def write_run_dir(config: TrainConfig, report: TrainReport, out_dir) -> Path:
    """Emit the standard run artifacts into ``out_dir`` (created if needed)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "config.json", "w") as f:
        json.dump(config.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    write_trace_csv(report.trace, out / "trace.csv")
    save_theta(out / "theta.json", config.circuit(), report.final_theta)
    write_wave_csv(report.final_wave, out / "field.csv")
    write_velocity_csv(report.final_velocity, out / "velocity.csv")
    spec = config.circuit()
    summary = {
        "final_error": report.final_error,
        "final_loss": report.final_loss,
        "final_loss_fidelity": report.final_loss_fidelity,
        "wall_time": report.wall_time,
        "gate_count": spec.num_gates,
        "parameter_count": spec.num_params,
    }
    with open(out / "report.json", "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return out
