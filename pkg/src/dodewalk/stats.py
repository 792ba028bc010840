"""Summary statistics shared by the sampler, the solver, and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import math
import numpy as np

from .transition import JumpKernel
from .walk import EnsembleResult

__all__ = [
    "WalkSummary",
    "kernel_expected_jump",
    "mean_square_displacement",
    "position_histogram",
    "summarize",
    "tv_distance",
]


def position_histogram(
    final: np.ndarray, J: int
) -> tuple[np.ndarray, float]:
    """Occupancy of the window [-J, J]^N as probabilities.

    Returns the (2J+1)^N array plus the fraction of walkers that ended
    outside the window (they are excluded from the array).
    """
    if final.ndim != 2:
        raise ValueError("final must be (n_walkers, N)")
    n_walkers, N = final.shape
    inside = (np.abs(final) <= J).all(axis=1)
    side = 2 * J + 1
    shifted = (final[inside] + J).astype(np.int64)
    flat = np.ravel_multi_index(tuple(shifted.T), (side,) * N)
    counts = np.bincount(flat, minlength=side**N).reshape((side,) * N)
    return counts / n_walkers, 1.0 - inside.sum() / n_walkers


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    """Total variation distance between two sub-probability arrays.

    Inputs share a window; whatever mass each is missing from 1 is
    treated as a single off-window site, which keeps the result a true
    metric between the underlying distributions.
    """
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    inside = float(np.abs(p - q).sum())
    outside = abs(float(p.sum()) - float(q.sum()))
    return 0.5 * (inside + outside)


def mean_square_displacement(positions: np.ndarray, h: float) -> float:
    """Mean of |x|^2 in nm^2 over rows of lattice coordinates."""
    posf = positions.astype(float) * h
    return float(np.einsum("ij,ij->", posf, posf)) / len(positions)


def kernel_expected_jump(kernel: JumpKernel) -> tuple[float, float]:
    """Mean and standard deviation of the jump length under the kernel.

    Deterministic counterpart of the sampled jump-length average; the
    Monte Carlo estimate over n jumps carries a standard error of
    sd / sqrt(n).
    """
    mean, var = kernel.expected_jump_nm()
    return mean, math.sqrt(max(var, 0.0))


@dataclass(frozen=True)
class WalkSummary:
    """Flat, JSON-ready digest of one ensemble run."""

    n_walkers: int
    n_steps: int
    tau_s: float
    horizon_s: float
    seed: int
    variant: str
    beta: float
    n_stay: int
    n_jump: int
    n_revisit: int
    n_blocked_jump: int
    n_blocked_revisit: int
    nonmarkov_fraction: float
    avg_move_nm: float
    avg_move_se_nm: float
    avg_jump_nm: float
    msd_final_nm2: float

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(result: EnsembleResult) -> WalkSummary:
    return WalkSummary(
        n_walkers=result.n_walkers,
        n_steps=result.n_steps,
        tau_s=result.tau,
        horizon_s=result.tau * result.n_steps,
        seed=result.seed,
        variant=result.variant,
        beta=result.beta,
        n_stay=result.n_stay,
        n_jump=result.n_jump,
        n_revisit=result.n_revisit,
        n_blocked_jump=result.n_blocked_jump,
        n_blocked_revisit=result.n_blocked_revisit,
        nonmarkov_fraction=result.nonmarkov_fraction,
        avg_move_nm=result.avg_move_nm if result.n_moves else 0.0,
        avg_move_se_nm=result.avg_move_se_nm if result.n_moves else 0.0,
        avg_jump_nm=result.avg_jump_nm if result.n_jump else 0.0,
        msd_final_nm2=float(result.msd_nm2[-1]),
    )
