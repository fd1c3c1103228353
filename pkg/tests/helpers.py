"""Independent reference implementations used as test oracles.

Everything here is deliberately slow and literal: full 2^n x 2^n gate
matrices for the circuit, and per-point loops for the field formulas. None
of it shares code paths with the package internals it checks.
"""

import numpy as np

from scwfprep.ansatz import CircuitSpec, gate_unitary
from scwfprep.grid import Grid
from scwfprep.trainer import TrainConfig

I2 = np.eye(2)


def expand_ops(ops: dict, n: int) -> np.ndarray:
    """Tensor single-qubit operators into the full 2^n matrix (qubit 0 = LSB)."""
    m = np.eye(1)
    for q in reversed(range(n)):
        m = np.kron(m, ops.get(q, I2))
    return m


def controlled_matrix(u: np.ndarray, control: int, polarity: int, target: int, n: int) -> np.ndarray:
    p_sel = np.diag([0.0, 1.0]) if polarity else np.diag([1.0, 0.0])
    p_rest = I2 - p_sel
    return expand_ops({control: p_rest}, n) + expand_ops({control: p_sel, target: u}, n)


def naive_forward(spec: CircuitSpec, theta) -> np.ndarray:
    """Apply the Hadamard layer and every gate as a dense matrix product."""
    n = spec.qubits
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    for q in range(n - 1):
        state = expand_ops({q: h}, n) @ state
    theta = np.asarray(theta, dtype=float)
    for i, gate in enumerate(spec.gates):
        u = gate_unitary(theta[3 * i : 3 * i + 3])
        state = controlled_matrix(u, gate.control, gate.polarity, n - 1, n) @ state
    return state


def neighbor_index(grid: Grid, j: int, axis: int, step: int) -> int:
    coords = list(int(c) for c in np.round(grid.coordinates[j] / grid.spacing))
    coords[axis] = (coords[axis] + step) % grid.points_per_dim
    return grid.flat_index(tuple(coords))


def brute_velocity(psi_values: np.ndarray, grid: Grid, hbar: float) -> np.ndarray:
    """Pointwise loop over a1 db1 - b1 da1 + a2 db2 - b2 da2."""
    m = grid.num_points
    u = np.zeros((m, grid.dim))
    for j in range(m):
        for k in range(grid.dim):
            jp = neighbor_index(grid, j, k, +1)
            jm = neighbor_index(grid, j, k, -1)
            total = 0.0
            for i in range(2):
                a = psi_values[j, i].real
                b = psi_values[j, i].imag
                da = (psi_values[jp, i].real - psi_values[jm, i].real) / (2 * grid.spacing)
                db = (psi_values[jp, i].imag - psi_values[jm, i].imag) / (2 * grid.spacing)
                total += a * db - b * da
            u[j, k] = hbar * total
    return u


def brute_misfit(psi_values: np.ndarray, u_target: np.ndarray, grid: Grid,
                 hbar: float, eps: float) -> float:
    """Term-by-term re-evaluation of the regularized misfit."""
    u = brute_velocity(psi_values, grid, hbar)
    total = 0.0
    for j in range(grid.num_points):
        for k in range(grid.dim):
            total += (u[j, k] - u_target[j, k]) ** 2
    reg = 0.0
    for j in range(grid.num_points):
        for k in range(grid.dim):
            jp = neighbor_index(grid, j, k, +1)
            jm = neighbor_index(grid, j, k, -1)
            for i in range(2):
                dpsi = (psi_values[jp, i] - psi_values[jm, i]) / (2 * grid.spacing)
                r = hbar * dpsi - 1j * u[j, k] * psi_values[j, i]
                reg += abs(r) ** 2
    return grid.cell_volume * (total + eps * eps * reg)


def random_normalized_wave(grid: Grid, seed: int) -> np.ndarray:
    """Random pointwise-normalized two-component field values."""
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(grid.num_points, 2)) + 1j * rng.normal(size=(grid.num_points, 2))
    norms = np.sqrt(np.sum(np.abs(raw) ** 2, axis=1, keepdims=True))
    return raw / norms


CASE1_DICT = dict(
    dim=1, N=32, qubits=6, groups=2, hbar=1.0, target=["sin(x)"],
    iters=10000, lr_start=0.03, lr_end=0.015, eps_start=1.0,
    eps_decay=0.7, eps_every=1000, seed=1, weight_decay=0.0,
    noise_lambda=0.0, trace_every=100,
)

CASE2_DICT = dict(CASE1_DICT, target=["sin(x)+cos(2*x)+sin(3*x)"])

CASE3_DICT = dict(
    CASE1_DICT, dim=2, qubits=11, groups=5,
    target=["cos(x)*sin(y)", "sin(x)*cos(y)"],
)

TINY_DICT = dict(
    dim=1, N=8, qubits=4, groups=2, hbar=1.0, target=["sin(x)"],
    iters=60, lr_start=0.03, lr_end=0.015, eps_start=1.0,
    eps_decay=0.7, eps_every=1000, seed=3, weight_decay=0.0,
    noise_lambda=0.0, trace_every=20,
)


def make_config(base: dict, **overrides) -> TrainConfig:
    data = dict(base)
    data.update(overrides)
    return TrainConfig.from_dict(data)
