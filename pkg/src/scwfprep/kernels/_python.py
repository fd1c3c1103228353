"""Pure numpy spinor-chain kernels (reference semantics for the compiled ones).

Adjoint convention: for a complex quantity z the adjoint vectors store
dL/d(Re z) + i dL/d(Im z). Under y = U s this pulls back as w -> U^H w, and
a parameter entering through U contributes dL/dtheta = Re(w^H (dU/dtheta) s)
summed over the points where the gate fires.
"""

from __future__ import annotations

import numpy as np

name = "python"


def forward_spinors(controls, polarities, unitaries, num_points) -> np.ndarray:
    """Evolve every grid point's spinor from (1, 0) through the gate chain.

    Gate g applies ``unitaries[g]`` at point j iff bit controls[g] of j
    equals polarities[g].
    """
    psi = np.zeros((num_points, 2), dtype=np.complex128)
    psi[:, 0] = 1.0
    idx = np.arange(num_points)
    for g in range(len(controls)):
        mask = ((idx >> controls[g]) & 1) == polarities[g]
        psi[mask] = psi[mask] @ unitaries[g].T
    return psi


def chain_backward(controls, polarities, unitaries, derivs, psi_out, w_out) -> np.ndarray:
    """Adjoint sweep through the gate chain, returning d(loss)/d(theta).

    ``psi_out`` holds the forward output spinors and ``w_out`` the field
    gradient seeds (complex-packed real derivatives, see module docstring).
    Intermediate states are recovered in place by unwinding with U^H, so no
    forward tape is stored. Per-gate sums run in fixed point order, keeping
    the result deterministic.
    """
    psi = psi_out.copy()
    w = w_out.copy()
    idx = np.arange(psi.shape[0])
    grad = np.zeros(3 * len(controls))
    for g in range(len(controls) - 1, -1, -1):
        mask = ((idx >> controls[g]) & 1) == polarities[g]
        u_conj = np.conj(unitaries[g])
        s_prev = psi[mask] @ u_conj  # rows s -> U^H s
        wm = w[mask]
        for p in range(3):
            v = s_prev @ derivs[g, p].T
            grad[3 * g + p] = float(np.sum(np.real(np.conj(wm) * v)))
        w[mask] = wm @ u_conj
        psi[mask] = s_prev
    return grad
