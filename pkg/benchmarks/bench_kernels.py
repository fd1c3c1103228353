#!/usr/bin/env python3
"""Benchmark the compiled spinor-chain kernels against the numpy fallback.

Times the raw kernels (forward + adjoint sweep) and one full loss-and-gradient
evaluation for the two standard problem shapes, then prints per-iteration
costs and the compiled/python speedup. Also cross-checks that both backends
agree on the gradient.

Usage: python benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from scwfprep import kernels
from scwfprep.ansatz import build_spec, gate_unitaries, gate_unitary_derivs
from scwfprep.diffprog import loss_and_grad
from scwfprep.exprparse import eval_on_grid, parse
from scwfprep.field import VelocityField
from scwfprep.grid import Grid

SHAPES = {
    "1d-n6": dict(dim=1, n_points=32, qubits=6, groups=2, targets=["sin(x)"]),
    "2d-n11": dict(dim=2, n_points=32, qubits=11, groups=5,
                   targets=["cos(x)*sin(y)", "sin(x)*cos(y)"]),
}


def build_problem(shape):
    grid = Grid(shape["dim"], shape["n_points"])
    spec = build_spec(shape["qubits"], shape["groups"])
    cols = [eval_on_grid(parse(t), grid) for t in shape["targets"]]
    target = VelocityField(grid, np.column_stack(cols))
    theta = np.random.default_rng(0).uniform(-0.5, 0.5, spec.num_params)
    return spec, theta, target


def time_call(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def bench_shape(name, shape, repeats):
    spec, theta, target = build_problem(shape)
    unitaries = gate_unitaries(theta)
    derivs = gate_unitary_derivs(theta)
    m = spec.num_grid_points
    rng = np.random.default_rng(1)
    w_seed = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))

    rows = {}
    grads = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)
        psi = kernels.forward_spinors(spec.control_array, spec.polarity_array, unitaries, m)
        t_fwd = time_call(
            lambda: kernels.forward_spinors(spec.control_array, spec.polarity_array, unitaries, m),
            repeats,
        )
        t_bwd = time_call(
            lambda: kernels.chain_backward(
                spec.control_array, spec.polarity_array, unitaries, derivs, psi, w_seed
            ),
            repeats,
        )
        t_loss = time_call(lambda: loss_and_grad(spec, theta, target, 1.0, 1.0), repeats)
        grads[backend] = loss_and_grad(spec, theta, target, 1.0, 1.0)[1]
        rows[backend] = (t_fwd, t_bwd, t_loss)
    kernels.set_backend("auto")

    print(f"\n{name}: {spec.num_gates} gates, {m} grid points, {spec.num_params} parameters")
    print(f"  {'backend':8s} {'forward':>12s} {'backward':>12s} {'loss+grad':>12s}")
    for backend, (t_fwd, t_bwd, t_loss) in rows.items():
        print(f"  {backend:8s} {t_fwd*1e6:10.1f}us {t_bwd*1e6:10.1f}us {t_loss*1e6:10.1f}us")
    if len(rows) == 2:
        ratio = rows["python"][2] / rows["cython"][2]
        print(f"  loss+grad speedup (python/cython): {ratio:.1f}x")
        scale = max(1.0, float(np.max(np.abs(grads["python"]))))
        dev = float(np.max(np.abs(grads["python"] - grads["cython"]))) / scale
        print(f"  gradient agreement: {dev:.2e}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    print("available backends:", ", ".join(kernels.available_backends()))
    for name, shape in SHAPES.items():
        bench_shape(name, shape, args.repeats)


if __name__ == "__main__":
    main()
