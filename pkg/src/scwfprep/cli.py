"""Command-line interface: train, sweep, oracle, decode.

Exit codes: 0 success, 1 runtime failure (e.g. divergence), 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import exprparse
from .ansatz import forward_spinors, load_theta
from .field import (
    VelocityField,
    WaveField,
    analytic_sin_wave,
    relative_error,
    velocity_from_wave,
    write_velocity_csv,
    write_wave_csv,
)
from .grid import Grid
from .trainer import DivergenceError, TrainConfig, train, write_run_dir

SWEEP_PARAMS = ("hbar", "groups", "N", "noise_lambda")

DEFAULT_SWEEP_VALUES = {
    "hbar": [0.2, 0.5, 1.0, 2.0, 5.0],
    "groups": [1, 2, 3, 4],
    "N": [16, 32, 64, 128],
    "noise_lambda": [0.02, 0.05, 0.1, 0.2],
}

# grid-resolution sweeps need extra circuit depth to resolve the finer scales
N_SWEEP_GROUPS = 3


def _load_json(path) -> dict:
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON in {path}: {exc}") from exc


def _load_config(path) -> TrainConfig:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must be a JSON object")
    return TrainConfig.from_dict(data)


def cmd_train(args) -> int:
    config = _load_config(args.config)
    report = train(config)
    out = write_run_dir(config, report, args.out)
    print(f"final_error={report.final_error:.6f} run_dir={out}")
    return 0


def _sweep_config(base: TrainConfig, param: str, value) -> TrainConfig:
    data = base.to_dict()
    if param == "N":
        n = int(value)
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError(f"N sweep value must be a power of two, got {value}")
        data["N"] = n
        data["qubits"] = base.dim * int(np.log2(n)) + 1
        data["groups"] = N_SWEEP_GROUPS
    elif param == "groups":
        data["groups"] = int(value)
    elif param == "hbar":
        data["hbar"] = float(value)
    elif param == "noise_lambda":
        data["noise_lambda"] = float(value)
    else:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")
    return TrainConfig.from_dict(data)


def _run_sweep_case(payload):
    """One sub-run; top-level so it can cross a process boundary."""
    config_dict, run_dir = payload
    config = TrainConfig.from_dict(config_dict)
    started = time.perf_counter()
    try:
        report = train(config)
        write_run_dir(config, report, run_dir)
        return report.final_error, report.wall_time, None
    except Exception as exc:  # recorded in the sweep table, sweep continues
        return float("nan"), time.perf_counter() - started, str(exc)


def cmd_sweep(args) -> int:
    spec = _load_json(args.spec)
    if not isinstance(spec, dict):
        raise ValueError(f"sweep spec {args.spec} must be a JSON object")
    unknown = [k for k in spec if k not in ("param", "values", "seeds", "base")]
    if unknown:
        raise ValueError(f"sweep spec has unknown keys: {unknown}")
    try:
        param = spec["param"]
        base = TrainConfig.from_dict(spec["base"])
    except KeyError as exc:
        raise ValueError(f"sweep spec is missing key {exc}") from exc
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {SWEEP_PARAMS}")
    values = spec.get("values", DEFAULT_SWEEP_VALUES[param])
    if not values:
        raise ValueError("sweep values must be nonempty")
    seeds = spec.get("seeds", [base.seed])
    if not seeds:
        raise ValueError("sweep seeds must be nonempty")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cases = []
    for value in values:
        for seed in seeds:
            config = _sweep_config(base, param, value)
            data = config.to_dict()
            data["seed"] = int(seed)
            run_dir = out / f"{param}_{value}" / f"seed_{seed}"
            cases.append((value, seed, (data, run_dir)))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_sweep_case, [c[2] for c in cases]))
    else:
        results = [_run_sweep_case(c[2]) for c in cases]

    with open(out / "sweep.csv", "w") as f:
        f.write("param,value,seed,final_error,wall_time\n")
        for (value, seed, _), (err, wall, failure) in zip(cases, results):
            if failure is not None:
                print(f"sweep case {param}={value} seed={seed} failed: {failure}",
                      file=sys.stderr)
            f.write("%s,%.17g,%d,%.17g,%.17g\n" % (param, value, seed, err, wall))
    print(f"sweep_dir={out}")
    return 0


def cmd_oracle(args) -> int:
    try:
        sizes = [int(s) for s in args.N.split(",") if s.strip()]
    except ValueError as exc:
        raise ValueError(f"invalid N list {args.N!r}: {exc}") from exc
    if not sizes:
        raise ValueError("need at least one grid size")
    grids = [Grid(1, n) for n in sizes]  # raises for non-powers-of-two
    print("N,rel_error")
    for n, grid in zip(sizes, grids):
        psi = analytic_sin_wave(grid)
        u = velocity_from_wave(psi, 1.0)
        target = VelocityField(grid, np.sin(grid.coordinates[:, 0]))
        print("%d,%.17g" % (n, relative_error(u, target)))
    return 0


def cmd_decode(args) -> int:
    spec, theta = load_theta(args.theta)
    config = _load_config(args.config)
    if spec.qubits != config.qubits or spec.groups != config.groups:
        raise ValueError(
            f"checkpoint circuit (n={spec.qubits}, groups={spec.groups}) does not "
            f"match config (n={config.qubits}, groups={config.groups})"
        )
    grid = config.grid()
    # same decoding path as the trainer, so re-emitted files match its
    # artifacts byte for byte
    wave = WaveField(grid, forward_spinors(spec, theta))
    velocity = velocity_from_wave(wave, config.hbar)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_wave_csv(wave, out / "field.csv")
    write_velocity_csv(velocity, out / "velocity.csv")
    print(f"decode_dir={out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scwfprep",
        description="Construct wave-function encodings of periodic velocity "
        "fields by training a normalization-preserving circuit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="run one training case")
    p.add_argument("--config", required=True, help="path to a config JSON file")
    p.add_argument("--out", required=True, help="run directory to create")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    p.add_argument("--spec", required=True, help="path to a sweep JSON file")
    p.add_argument("--out", required=True, help="sweep directory to create")
    p.add_argument("--jobs", type=int, default=1, help="parallel sub-runs (default 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="closed-form convergence check, prints CSV")
    p.add_argument("--N", required=True, help="comma-separated grid sizes, e.g. 16,32,64")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("decode", help="re-emit fields from a theta checkpoint")
    p.add_argument("--theta", required=True, help="path to theta.json")
    p.add_argument("--config", required=True, help="path to the matching config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_decode)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (exprparse.ParseError, exprparse.EvalError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
