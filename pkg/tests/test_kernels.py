import subprocess
import sys

import numpy as np
import pytest

from scwfprep import kernels
from scwfprep.ansatz import build_spec, gate_unitaries, gate_unitary_derivs


def _random_problem(n, groups, seed):
    spec = build_spec(n, groups)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, spec.num_params)
    unitaries = gate_unitaries(theta)
    derivs = gate_unitary_derivs(theta)
    m = spec.num_grid_points
    w = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
    return spec, unitaries, derivs, w


def test_backend_selection():
    assert kernels.active_backend() in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
    kernels.set_backend("auto")


def test_env_var_selects_backend():
    out = subprocess.run(
        [sys.executable, "-c", "from scwfprep import kernels; print(kernels.active_backend())"],
        env={"PATH": "/usr/bin:/bin", "SCWFPREP_KERNELS": "python"},
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == "python"


def test_forward_deterministic():
    spec, unitaries, _, _ = _random_problem(6, 2, 0)
    a = kernels.forward_spinors(spec.control_array, spec.polarity_array, unitaries, 32)
    b = kernels.forward_spinors(spec.control_array, spec.polarity_array, unitaries, 32)
    assert np.array_equal(a, b)


def test_backward_does_not_mutate_inputs():
    spec, unitaries, derivs, w = _random_problem(4, 2, 1)
    psi = kernels.forward_spinors(spec.control_array, spec.polarity_array, unitaries, 8)
    psi_copy = psi.copy()
    w_copy = w.copy()
    kernels.chain_backward(
        spec.control_array, spec.polarity_array, unitaries, derivs, psi, w
    )
    assert np.array_equal(psi, psi_copy)
    assert np.array_equal(w, w_copy)


def test_empty_gate_list():
    controls = np.zeros(0, dtype=np.int32)
    polarities = np.zeros(0, dtype=np.int8)
    unitaries = np.zeros((0, 2, 2), dtype=complex)
    derivs = np.zeros((0, 3, 2, 2), dtype=complex)
    psi = kernels.forward_spinors(controls, polarities, unitaries, 4)
    assert np.array_equal(psi[:, 0], np.ones(4))
    grad = kernels.chain_backward(controls, polarities, unitaries, derivs, psi, psi)
    assert grad.shape == (0,)


@pytest.mark.skipif(
    len(kernels.available_backends()) < 2,
    reason="compiled backend not built; nothing to compare",
)
@pytest.mark.parametrize("n,groups", [(2, 1), (4, 2), (6, 2), (11, 5)])
def test_backend_parity(n, groups):
    spec, unitaries, derivs, w = _random_problem(n, groups, n)
    m = spec.num_grid_points
    results = {}
    try:
        for name in kernels.available_backends():
            kernels.set_backend(name)
            psi = kernels.forward_spinors(
                spec.control_array, spec.polarity_array, unitaries, m
            )
            grad = kernels.chain_backward(
                spec.control_array, spec.polarity_array, unitaries, derivs, psi, w
            )
            results[name] = (psi, grad)
    finally:
        kernels.set_backend("auto")
    ref_psi, ref_grad = results["python"]
    got_psi, got_grad = results["cython"]
    assert np.max(np.abs(got_psi - ref_psi)) < 1e-12
    scale = max(1.0, np.max(np.abs(ref_grad)))
    assert np.max(np.abs(got_grad - ref_grad)) / scale < 1e-12
