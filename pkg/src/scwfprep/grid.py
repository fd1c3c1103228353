"""Periodic uniform grid over [0, 2*pi]^d and central-difference operators.

Scalar fields live on the grid as flat numpy arrays of length N**d. The
flattening puts the first dimension fastest, j = i1 + N*i2, which also fixes
the meaning of the position bits in the companion circuit encoding (bit k of
j selects the state of position qubit k), so it must not change.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice with ``points_per_dim`` points per dimension.

    ``points_per_dim`` must be a power of two so that the full grid can be
    indexed by the position qubits of a circuit with 2^(n-1) = N^d.
    """

    dim: int
    points_per_dim: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        n = self.points_per_dim
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"points_per_dim must be a power of two >= 2, got {n}")

    @property
    def spacing(self) -> float:
        return TWO_PI / self.points_per_dim

    @property
    def domain_length(self) -> float:
        return TWO_PI

    @property
    def num_points(self) -> int:
        return self.points_per_dim**self.dim

    @property
    def cell_volume(self) -> float:
        """Quadrature weight of one cell, spacing**dim."""
        return self.spacing**self.dim

    @cached_property
    def coordinates(self) -> np.ndarray:
        """(num_points, dim) array of point coordinates in flat-index order."""
        idx = np.arange(self.num_points)
        n = self.points_per_dim
        cols = [((idx // n**k) % n) * self.spacing for k in range(self.dim)]
        return np.column_stack(cols)

    def flat_index(self, coords: tuple[int, ...]) -> int:
        """Map integer grid coordinates (i1, ..., id) to the flat index j."""
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        n = self.points_per_dim
        j = 0
        for i in reversed(coords):
            if not 0 <= i < n:
                raise ValueError(f"coordinate {i} outside [0, {n})")
            j = j * n + i
        return j

    def central_diff(self, values: np.ndarray, axis: int) -> np.ndarray:
        """Second-order central difference along a grid dimension.

        Periodic wraparound on every axis: the stencil at the domain edge
        reuses values from the opposite edge. Complex input is differenced
        componentwise on real and imaginary parts (the stencil is
        real-linear).
        """
        if not 0 <= axis < self.dim:
            raise ValueError(f"axis {axis} outside [0, {self.dim})")
        f = np.asarray(values)
        if f.shape != (self.num_points,):
            raise ValueError(f"field has shape {f.shape}, expected ({self.num_points},)")
        shaped = f.reshape((self.points_per_dim,) * self.dim)
        # flat order is first-dimension-fastest, so grid axis k is numpy
        # axis dim-1-k of the reshaped array
        ax = self.dim - 1 - axis
        out = (np.roll(shaped, -1, axis=ax) - np.roll(shaped, 1, axis=ax)) / (2.0 * self.spacing)
        return out.reshape(-1)
