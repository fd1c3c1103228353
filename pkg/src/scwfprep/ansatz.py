"""Normalization-preserving variational circuit on n qubits.

A Hadamard layer spreads |0...0> uniformly over the n-1 position qubits;
every gate after it is a singly-controlled 2x2 unitary targeting the one
component qubit (the tensor-leftmost, i.e. the highest bit of the state
index). Because position qubits are never touched again, each grid point's
two-component spinor evolves through its own chain of unitaries and stays
exactly normalized for every parameter value. The state amplitude at index
c * 2^(n-1) + j is spinor_j[c] / sqrt(2^(n-1)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import kernels
from .field import WaveField
from .grid import Grid

SOLID = 1  # gate acts when the control qubit reads |1>
OPEN = 0  # gate acts when the control qubit reads |0>


@dataclass(frozen=True)
class GateSlot:
    """One controlled-rotation slot: control qubit, polarity, group index."""

    control: int
    polarity: int
    group: int


@dataclass
class CircuitSpec:
    """Circuit layout: qubit count, group count, and the ordered gate list."""

    qubits: int
    groups: int
    gates: tuple[GateSlot, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.qubits < 2:
            raise ValueError(f"need at least 2 qubits, got {self.qubits}")
        self.gates = tuple(self.gates)
        for g in self.gates:
            if not 0 <= g.control < self.qubits - 1:
                raise ValueError(
                    f"control qubit {g.control} outside position range "
                    f"[0, {self.qubits - 1})"
                )
            if g.polarity not in (0, 1):
                raise ValueError(f"polarity must be 0 or 1, got {g.polarity}")

    @property
    def num_gates(self) -> int:
        return len(self.gates)

    @property
    def num_params(self) -> int:
        return 3 * len(self.gates)

    @property
    def num_grid_points(self) -> int:
        return 2 ** (self.qubits - 1)

    @cached_property
    def control_array(self) -> np.ndarray:
        return np.array([g.control for g in self.gates], dtype=np.int32)

    @cached_property
    def polarity_array(self) -> np.ndarray:
        return np.array([g.polarity for g in self.gates], dtype=np.int8)


@dataclass
class StateVector:
    """Full 2^n amplitude vector of the circuit output."""

    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        size = self.amplitudes.size
        if size < 4 or (size & (size - 1)) != 0:
            raise ValueError(f"amplitude count must be a power of two >= 4, got {size}")

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def build_spec(n: int, n_groups: int) -> CircuitSpec:
    """Standard gate layout: ``n_groups`` copies of the full control sweep.

    Within a group the control qubit ascends 0 .. n-2 and, for each control,
    the solid-controlled gate precedes the open-controlled one, giving
    2(n-1) gates per group. Any fixed order spans the same family; this one
    is the package convention so parameter vectors are portable.
    """
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got {n}")
    if n_groups < 1:
        raise ValueError(f"need at least 1 group, got {n_groups}")
    gates = [
        GateSlot(control, polarity, group)
        for group in range(n_groups)
        for control in range(n - 1)
        for polarity in (SOLID, OPEN)
    ]
    return CircuitSpec(qubits=n, groups=n_groups, gates=tuple(gates))


def gate_unitary(angles) -> np.ndarray:
    """2x2 unitary from three Euler angles, Rz(beta) Ry(alpha) Rz(gamma).

    [[cos(a/2) e^{-i(b+g)/2}, -sin(a/2) e^{-i(b-g)/2}],
     [sin(a/2) e^{+i(b-g)/2},  cos(a/2) e^{+i(b+g)/2}]]

    Covers U(2) up to a global phase, which the velocity encoding cannot
    observe anyway.
    """
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (3,):
        raise ValueError(f"expected 3 angles, got shape {angles.shape}")
    return gate_unitaries(angles)[0]


def gate_unitaries(theta) -> np.ndarray:
    """(K, 2, 2) array of gate unitaries from a flat parameter vector."""
    t = np.asarray(theta, dtype=float).reshape(-1, 3)
    c = np.cos(t[:, 0] / 2)
    s = np.sin(t[:, 0] / 2)
    ep = np.exp(-0.5j * (t[:, 1] + t[:, 2]))
    em = np.exp(-0.5j * (t[:, 1] - t[:, 2]))
    u = np.empty((t.shape[0], 2, 2), dtype=np.complex128)
    u[:, 0, 0] = c * ep
    u[:, 0, 1] = -s * em
    u[:, 1, 0] = s * np.conj(em)
    u[:, 1, 1] = c * np.conj(ep)
    return u


def gate_unitary_derivs(theta) -> np.ndarray:
    """(K, 3, 2, 2) array of dU/d(angle) for each gate.

    d/d(alpha) rotates the Ry factor; d/d(beta) and d/d(gamma) left- and
    right-multiply by -i/2 sigma_z, i.e. scale rows and columns of U by
    -+ i/2.
    """
    t = np.asarray(theta, dtype=float).reshape(-1, 3)
    u = gate_unitaries(theta)
    c = np.cos(t[:, 0] / 2)
    s = np.sin(t[:, 0] / 2)
    ep = np.exp(-0.5j * (t[:, 1] + t[:, 2]))
    em = np.exp(-0.5j * (t[:, 1] - t[:, 2]))
    du = np.empty((t.shape[0], 3, 2, 2), dtype=np.complex128)
    du[:, 0, 0, 0] = -0.5 * s * ep
    du[:, 0, 0, 1] = -0.5 * c * em
    du[:, 0, 1, 0] = 0.5 * c * np.conj(em)
    du[:, 0, 1, 1] = -0.5 * s * np.conj(ep)
    du[:, 1, 0, :] = -0.5j * u[:, 0, :]
    du[:, 1, 1, :] = 0.5j * u[:, 1, :]
    du[:, 2, :, 0] = -0.5j * u[:, :, 0]
    du[:, 2, :, 1] = 0.5j * u[:, :, 1]
    return du


def check_theta(spec: CircuitSpec, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.num_params,):
        raise ValueError(
            f"theta has shape {theta.shape}, expected ({spec.num_params},)"
        )
    return theta


def forward_spinors(spec: CircuitSpec, theta) -> np.ndarray:
    """Per-point spinors after the full gate sequence, shape (2^(n-1), 2).

    Point j starts at (1, 0) (the Hadamard layer leaves every component
    qubit in |0>) and gate g applies its unitary exactly when bit
    control_g of j equals the gate polarity.
    """
    theta = check_theta(spec, theta)
    return kernels.forward_spinors(
        spec.control_array,
        spec.polarity_array,
        gate_unitaries(theta),
        spec.num_grid_points,
    )


def forward(spec: CircuitSpec, theta) -> StateVector:
    """Simulate the circuit from |0>^n and return the full statevector."""
    spinors = forward_spinors(spec, theta)
    scale = 1.0 / np.sqrt(spec.num_grid_points)
    return StateVector(np.concatenate([spinors[:, 0], spinors[:, 1]]) * scale)


def decode(state: StateVector, grid: Grid) -> WaveField:
    """Read the wave field out of a statevector: psi_c(x_j) = sqrt(M) amp."""
    m = grid.num_points
    if state.amplitudes.size != 2 * m:
        raise ValueError(
            f"statevector holds {state.amplitudes.size // 2} grid points, "
            f"grid has {m}"
        )
    scale = np.sqrt(m)
    values = np.column_stack(
        [scale * state.amplitudes[:m], scale * state.amplitudes[m:]]
    )
    return WaveField(grid, values)


def encode(psi: WaveField) -> StateVector:
    """Inverse of decode: pack a wave field into 2^n amplitudes."""
    scale = 1.0 / np.sqrt(psi.grid.num_points)
    return StateVector(
        np.concatenate([psi.values[:, 0], psi.values[:, 1]]) * scale
    )


def save_theta(path, spec: CircuitSpec, theta) -> None:
    """Write a parameter checkpoint: {"n": ..., "groups": ..., "theta": [...]}."""
    theta = check_theta(spec, theta)
    payload = {"n": spec.qubits, "groups": spec.groups, "theta": list(map(float, theta))}
    with open(path, "w") as f:
        json.dump(payload, f)
        f.write("\n")


def load_theta(path) -> tuple[CircuitSpec, np.ndarray]:
    """Read a checkpoint and rebuild its circuit; validates the length."""
    with open(path) as f:
        payload = json.load(f)
    try:
        n = int(payload["n"])
        groups = int(payload["groups"])
        theta = np.asarray(payload["theta"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed theta checkpoint {path}: {exc}") from exc
    spec = build_spec(n, groups)
    return spec, check_theta(spec, theta)
