"""Wave-function encodings of periodic velocity fields via a trained
normalization-preserving circuit, simulated on a classical statevector."""

from .ansatz import (
    CircuitSpec,
    GateSlot,
    StateVector,
    build_spec,
    decode,
    encode,
    forward,
    gate_unitary,
    load_theta,
    save_theta,
)
from .diffprog import fd_check, loss_and_grad
from .field import (
    SpinField,
    VelocityField,
    WaveField,
    add_noise,
    analytic_sin_wave,
    hopf_map,
    regularized_misfit,
    relative_error,
    velocity_from_wave,
)
from .grid import Grid
from .optimizer import AdamWState, Schedule, adamw_step
from .trainer import (
    DivergenceError,
    TrainConfig,
    TrainReport,
    evaluate,
    train,
    write_run_dir,
)

__all__ = [
    "AdamWState",
    "CircuitSpec",
    "DivergenceError",
    "GateSlot",
    "Grid",
    "Schedule",
    "SpinField",
    "StateVector",
    "TrainConfig",
    "TrainReport",
    "VelocityField",
    "WaveField",
    "adamw_step",
    "add_noise",
    "analytic_sin_wave",
    "build_spec",
    "decode",
    "encode",
    "evaluate",
    "fd_check",
    "forward",
    "gate_unitary",
    "hopf_map",
    "load_theta",
    "loss_and_grad",
    "regularized_misfit",
    "relative_error",
    "save_theta",
    "train",
    "velocity_from_wave",
    "write_run_dir",
]

__version__ = "0.1.0"
