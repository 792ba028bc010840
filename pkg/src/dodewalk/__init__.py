"""Random walks and densities for multi-term distributed-order
fractional diffusion on a lattice.

The sampler (`run_walk`, `run_ensemble`) and the finite-difference
solver (`fd_run`) discretize the same transition law, so their
one-time distributions agree and each one checks the other.
"""

__version__ = "0.1.0"

from .fdsolve import DensityGrid, FDResult, WindowLossError, fd_run, fd_step
from .spacefrac import (
    LatticeGeometry,
    SpectralMixture,
    StabilityError,
    b_coeff,
    lattice_sum,
    q_coefficient,
    q_zero,
    shell_rates,
    stability_check,
    tail_report,
    tau_for_p0,
    tau_max,
)
from .stats import (
    WalkSummary,
    kernel_expected_jump,
    mean_square_displacement,
    position_histogram,
    summarize,
    tv_distance,
)
from .timefrac import (
    WeightLadder,
    WeightTable,
    caputo_weights,
    emit_weight_profile,
    gl_weights,
    weight_table,
)
from .transition import (
    JumpKernel,
    SamplerPartition,
    StepChoice,
    build_kernel,
    build_partition,
    sample_jump,
    sample_step,
)
from .walk import (
    BarrierSpec,
    EnsembleResult,
    Trajectory,
    barrier_walk,
    run_ensemble,
    run_walk,
)

__all__ = [
    "__version__",
    "BarrierSpec",
    "DensityGrid",
    "EnsembleResult",
    "FDResult",
    "JumpKernel",
    "LatticeGeometry",
    "SamplerPartition",
    "SpectralMixture",
    "StabilityError",
    "StepChoice",
    "Trajectory",
    "WalkSummary",
    "WeightLadder",
    "WeightTable",
    "WindowLossError",
    "b_coeff",
    "barrier_walk",
    "build_kernel",
    "build_partition",
    "caputo_weights",
    "emit_weight_profile",
    "fd_run",
    "fd_step",
    "gl_weights",
    "kernel_expected_jump",
    "lattice_sum",
    "mean_square_displacement",
    "position_histogram",
    "q_coefficient",
    "q_zero",
    "run_ensemble",
    "run_walk",
    "sample_jump",
    "sample_step",
    "shell_rates",
    "stability_check",
    "summarize",
    "tail_report",
    "tau_for_p0",
    "tau_max",
    "tv_distance",
    "weight_table",
]
