"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; set the environment
variable ``SCWFPREP_KERNELS`` to ``python`` or ``cython`` to force one, or
call :func:`set_backend` at runtime (used by the benchmark and the parity
tests). Both backends implement the same two functions with identical
semantics; see ``_python.py`` for the documented reference.
"""

from __future__ import annotations

import os

import numpy as np

from . import _python

try:
    from . import _chain as _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": _python}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _resolve(name: str):
    if name == "auto":
        name = "cython" if _compiled is not None else "python"
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {available_backends()}"
        )
    return _BACKENDS[name]


_active = _resolve(os.environ.get("SCWFPREP_KERNELS", "auto"))


def set_backend(name: str) -> None:
    global _active
    _active = _resolve(name)


def active_backend() -> str:
    return _active.name


def forward_spinors(controls, polarities, unitaries, num_points) -> np.ndarray:
    return _active.forward_spinors(
        np.ascontiguousarray(controls, dtype=np.int32),
        np.ascontiguousarray(polarities, dtype=np.int8),
        np.ascontiguousarray(unitaries, dtype=np.complex128),
        num_points,
    )


def chain_backward(controls, polarities, unitaries, derivs, psi_out, w_out) -> np.ndarray:
    return _active.chain_backward(
        np.ascontiguousarray(controls, dtype=np.int32),
        np.ascontiguousarray(polarities, dtype=np.int8),
        np.ascontiguousarray(unitaries, dtype=np.complex128),
        np.ascontiguousarray(derivs, dtype=np.complex128),
        np.ascontiguousarray(psi_out, dtype=np.complex128),
        np.ascontiguousarray(w_out, dtype=np.complex128),
    )
