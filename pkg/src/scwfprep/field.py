"""Wave, velocity, and spin fields on a periodic grid.

A wave field holds two complex components per grid point as a
(num_points, 2) complex array; a1, b1, a2, b2 are the real and imaginary
parts of the components. Velocity extraction, the Hopf map, the regularized
misfit, and the error metric all act pointwise on these flat arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid


@dataclass
class WaveField:
    """Two-component complex field, normalized to |psi1|^2 + |psi2|^2 = 1.

    The pointwise normalization is an invariant of circuit-produced fields,
    not something this class repairs: constructing a denormalized field is
    allowed (and useful in tests), but downstream formulas assume unit norm.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.num_points, 2):
            raise ValueError(
                f"wave values have shape {self.values.shape}, "
                f"expected ({self.grid.num_points}, 2)"
            )

    @property
    def a1(self) -> np.ndarray:
        return self.values[:, 0].real

    @property
    def b1(self) -> np.ndarray:
        return self.values[:, 0].imag

    @property
    def a2(self) -> np.ndarray:
        return self.values[:, 1].real

    @property
    def b2(self) -> np.ndarray:
        return self.values[:, 1].imag

    def pointwise_norm(self) -> np.ndarray:
        """|psi1|^2 + |psi2|^2 per grid point."""
        return np.abs(self.values[:, 0]) ** 2 + np.abs(self.values[:, 1]) ** 2


@dataclass
class VelocityField:
    """Real d-vector per grid point, one column per dimension."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape != (self.grid.num_points, self.grid.dim):
            raise ValueError(
                f"velocity values have shape {self.values.shape}, "
                f"expected ({self.grid.num_points}, {self.grid.dim})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("velocity values must be finite")

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean magnitude."""
        return np.sqrt(np.sum(self.values**2, axis=1))


@dataclass
class SpinField:
    """Unit 3-vector per grid point (Bloch-sphere image of a wave field)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (self.grid.num_points, 3):
            raise ValueError(
                f"spin values have shape {self.values.shape}, "
                f"expected ({self.grid.num_points}, 3)"
            )


def _require_same_grid(a: Grid, b: Grid):
    if a != b:
        raise ValueError(f"grids differ: {a} vs {b}")


def velocity_from_wave(psi: WaveField, hbar: float) -> VelocityField:
    """Extract the encoded velocity from a wave field.

    u_k = hbar * (a1 D_k b1 - b1 D_k a1 + a2 D_k b2 - b2 D_k a2)
        = hbar * sum_i Im(conj(psi_i) D_k psi_i),

    with D_k the periodic central difference along dimension k. Invariant
    under a global phase of psi. Assumes (but does not enforce) pointwise
    normalization.
    """
    g = psi.grid
    u = np.empty((g.num_points, g.dim))
    for k in range(g.dim):
        acc = np.zeros(g.num_points)
        for i in range(2):
            comp = psi.values[:, i]
            acc += np.imag(np.conj(comp) * g.central_diff(comp, k))
        u[:, k] = hbar * acc
    return VelocityField(g, u)


def hopf_map(psi: WaveField) -> SpinField:
    """Map a two-component wave field onto the Bloch sphere.

    s1 = a1^2 + b1^2 - a2^2 - b2^2
    s2 = 2 (a2 b1 - a1 b2)
    s3 = 2 (a1 a2 + b1 b2)

    For a pointwise-normalized field, |s| = 1 identically.
    """
    p1 = psi.values[:, 0]
    p2 = psi.values[:, 1]
    cross = p1 * np.conj(p2)
    s = np.empty((psi.grid.num_points, 3))
    s[:, 0] = np.abs(p1) ** 2 - np.abs(p2) ** 2
    s[:, 1] = 2.0 * cross.imag
    s[:, 2] = 2.0 * cross.real
    return SpinField(psi.grid, s)


def regularized_misfit(
    psi: WaveField, u_target: VelocityField, hbar: float, eps: float
) -> float:
    """Squared velocity mismatch plus the spinor-transport regularizer.

    Returns ||u_psi - u_t||^2 + eps^2 ||hbar grad(psi) - i u_psi psi||^2,
    where each norm is the Riemann sum spacing**dim * sum over grid points
    and components. The regularizer runs over both spinor components and
    all derivative directions, with u_psi extracted from the same psi.
    """
    _require_same_grid(psi.grid, u_target.grid)
    g = psi.grid
    u = velocity_from_wave(psi, hbar)
    diff = u.values - u_target.values
    total = float(np.sum(diff * diff))
    if eps != 0.0:
        reg = 0.0
        for k in range(g.dim):
            for i in range(2):
                comp = psi.values[:, i]
                resid = hbar * g.central_diff(comp, k) - 1j * u.values[:, k] * comp
                reg += float(np.sum(resid.real**2 + resid.imag**2))
        total += eps * eps * reg
    return g.cell_volume * total


def relative_error(u_psi: VelocityField, u_t: VelocityField) -> float:
    """Mean pointwise mismatch magnitude over mean target magnitude."""
    _require_same_grid(u_psi.grid, u_t.grid)
    denom = float(u_t.magnitude().mean())
    if denom == 0.0:
        raise ValueError("target velocity is identically zero; relative error undefined")
    num = float(np.sqrt(np.sum((u_psi.values - u_t.values) ** 2, axis=1)).mean())
    return num / denom


def analytic_sin_wave(grid: Grid) -> WaveField:
    """Closed-form wave field whose exact velocity is u(x) = sin(x), d=1.

    psi1 = sin(x/2 - pi/4) exp(i(-x/2 - cos(x)/2))
    psi2 = -cos(x/2 - pi/4) exp(i(+x/2 - cos(x)/2))

    The envelopes give |psi1|^2 - |psi2|^2 = -sin x; the phase windings
    -1/2 and +1/2 plus the shared periodic ripple combine to
    u = sin^2(w)(-1/2 + sin(x)/2) + cos^2(w)(1/2 + sin(x)/2) = sin x.
    Each component is the product of two sign-flipping factors, so the
    field is 2*pi-periodic and the periodic stencil keeps second-order
    accuracy everywhere.
    """
    if grid.dim != 1:
        raise ValueError("analytic sine wave field is one-dimensional")
    x = grid.coordinates[:, 0]
    w = x / 2.0 - np.pi / 4.0
    ripple = -0.5 * np.cos(x)
    values = np.empty((grid.num_points, 2), dtype=np.complex128)
    values[:, 0] = np.sin(w) * np.exp(1j * (-x / 2.0 + ripple))
    values[:, 1] = -np.cos(w) * np.exp(1j * (x / 2.0 + ripple))
    return WaveField(grid, values)


def add_noise(u: VelocityField, lam: float, seed: int) -> VelocityField:
    """Perturb each velocity component by lam * xi, xi uniform on [-1, 1].

    Draws are independent per grid point and per component from a generator
    seeded with ``seed``; the same seed reproduces the same field bitwise.
    """
    if lam < 0:
        raise ValueError(f"noise amplitude must be nonnegative, got {lam}")
    if lam == 0.0:
        return VelocityField(u.grid, u.values.copy())
    rng = np.random.default_rng(seed)
    xi = rng.uniform(-1.0, 1.0, size=u.values.shape)
    return VelocityField(u.grid, u.values + lam * xi)


def _fmt(x: float) -> str:
    return "%.17g" % x


def _coord_header(dim: int) -> list[str]:
    return ["x", "y"][:dim]


def write_wave_csv(psi: WaveField, path) -> None:
    """Write one row per grid point: coordinates then a1, b1, a2, b2."""
    header = _coord_header(psi.grid.dim) + ["a1", "b1", "a2", "b2"]
    coords = psi.grid.coordinates
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for j in range(psi.grid.num_points):
            row = [_fmt(c) for c in coords[j]]
            row += [
                _fmt(psi.values[j, 0].real),
                _fmt(psi.values[j, 0].imag),
                _fmt(psi.values[j, 1].real),
                _fmt(psi.values[j, 1].imag),
            ]
            f.write(",".join(row) + "\n")


def write_velocity_csv(u: VelocityField, path) -> None:
    """Write one row per grid point: coordinates then the velocity columns."""
    names = ["u"] if u.grid.dim == 1 else ["u1", "u2"]
    header = _coord_header(u.grid.dim) + names
    coords = u.grid.coordinates
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for j in range(u.grid.num_points):
            row = [_fmt(c) for c in coords[j]]
            row += [_fmt(v) for v in u.values[j]]
            f.write(",".join(row) + "\n")
