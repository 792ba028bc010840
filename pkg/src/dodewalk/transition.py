"""One-step transition law of the walk.

A step at time index n splits the unit interval into two parts:

* P1 = [0, 1 - w_n), the memory branch.  Its cells have widths
  w_0 .. w_{n-1}; drawing cell m sends the particle back to its own
  recorded position S_m (cell 0 is the starting point).  Prefix sums of
  the widths collapse to B_j = gamma_{n+1-j}, so cell lookup is a binary
  search on the gamma ladder, never a rebuilt cut vector.
* P2 = [1 - w_n, 1), the Markov branch.  Inside it, [0, p_0) is a stay
  and the remaining mass is split over the truncated jump offsets with
  p_k = nu tau^beta q_k, so p_0 + sum_k p_k = w_n exactly by
  construction.

All intervals are half-open; a deviate exactly on a cut belongs to the
cell on its right.  Sampling is a pure function of the tables and the
deviate, which is what makes ensemble replay bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import math
import numpy as np

from .spacefrac import (
    LatticeGeometry,
    SpectralMixture,
    StabilityError,
    q_zero,
    shell_rates,
    tail_report,
)
from .timefrac import WeightTable

__all__ = [
    "JumpKernel",
    "SamplerPartition",
    "StepChoice",
    "build_kernel",
    "build_partition",
    "sample_jump",
    "sample_step",
]

P0_CLAMP = -1e-12  # stay probabilities in [P0_CLAMP, 0) round up to zero


@dataclass(frozen=True)
class JumpKernel:
    """Markov-branch probabilities for one value of the top weight w_n.

    entries are ordered like the geometry's shell table (squared radius
    ascending, lexicographic within a shell); cumulative[0] = p0 and
    cumulative[-1] = w_n up to rounding, so a single searchsorted call
    maps a deviate in [0, w_n) to stay-or-offset.
    """

    geometry: LatticeGeometry
    tau: float
    p0: float
    offsets: np.ndarray        # (n_entries, N) int32
    probs: np.ndarray          # (n_entries,)
    cumulative: np.ndarray     # (n_entries + 1,)
    lengths_nm: np.ndarray     # (n_entries,) Euclidean jump lengths
    markov_mass: float         # w_n the kernel was built against
    nu_tau_beta: float         # common factor nu * tau^beta
    tail_remainder: float      # nu tau^beta * analytic tail-rate bound

    @property
    def n_entries(self) -> int:
        return len(self.offsets)

    def expected_jump_nm(self) -> tuple[float, float]:
        """Mean and variance of the jump length, conditioned on jumping.

        This is the deterministic cross-check for the Monte Carlo
        estimate of the average jump size (stays excluded).
        """
        mass = float(self.probs.sum())
        mean = float(np.dot(self.probs, self.lengths_nm)) / mass
        second = float(np.dot(self.probs, self.lengths_nm**2)) / mass
        return mean, second - mean * mean


def build_kernel(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    weights: WeightTable,
) -> JumpKernel:
    """Assemble the Markov-branch table p_k = nu tau^beta q_k.

    The stay probability is p_0 = w_n - nu tau^beta q_0 with q_0 the
    truncated total rate, so normalization against w_n is exact.  A p_0
    in [-1e-12, 0) is rounded up to zero (the tau = tau_max case); below
    that the step size is rejected as unstable.
    """
    if weights.beta != mixture.beta:
        raise ValueError(
            f"weights built for beta={weights.beta}, mixture has beta={mixture.beta}"
        )
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    factor = weights.nu * tau**weights.beta
    sh = geometry.shells
    q_shell = shell_rates(mixture, geometry)
    q0 = q_zero(mixture, geometry)
    p0 = weights.markov_mass - factor * q0
    if p0 < 0.0:
        if p0 < P0_CLAMP:
            raise StabilityError(
                f"tau = {tau} gives stay probability p_0 = {p0} < 0: "
                f"nu tau^beta q_0 = {factor * q0} exceeds w_n = "
                f"{weights.markov_mass}"
            )
        p0 = 0.0

    p_off = np.repeat(factor * q_shell, sh.counts)
    offsets = sh.offsets
    if np.any(q_shell == 0.0):
        # pure alpha = 2 terms leave all non-unit shells empty
        keep = p_off > 0.0
        p_off, offsets = p_off[keep], offsets[keep]
    lengths = np.sqrt((offsets.astype(float) ** 2).sum(axis=1)) * geometry.h
    cumulative = np.concatenate(([p0], p_off)).cumsum()
    tails = tail_report(mixture, geometry)
    return JumpKernel(
        geometry=geometry,
        tau=float(tau),
        p0=float(p0),
        offsets=offsets,
        probs=p_off,
        cumulative=cumulative,
        lengths_nm=lengths,
        markov_mass=weights.markov_mass,
        nu_tau_beta=factor,
        tail_remainder=factor * tails["tail_rate_total"],
    )


@dataclass(frozen=True)
class StepChoice:
    """Outcome of one deviate: either a Markov jump or a memory revisit."""

    kind: str                      # "jump" or "revisit"
    offset: np.ndarray | None = None   # jump offset, zero vector = stay
    revisit_m: int | None = None       # 0 <= m <= n-1; 0 is the start

    @classmethod
    def jump(cls, offset: np.ndarray) -> "StepChoice":
        return cls(kind="jump", offset=offset)

    @classmethod
    def revisit(cls, m: int) -> "StepChoice":
        return cls(kind="revisit", revisit_m=int(m))


@dataclass(frozen=True)
class SamplerPartition:
    """Partition of [0, 1) for one step index n.

    p1_width = gamma_1 is the total memory mass (zero at n = 0 or
    beta = 1); neg_gamma is the negated gamma ladder, ascending, that the
    revisit lookup binary-searches.
    """

    n: int
    p1_width: float
    neg_gamma: np.ndarray      # (n+1,), -gamma_0..-gamma_n
    kernel: JumpKernel

    @property
    def cuts(self) -> np.ndarray:
        """Memory-cell boundaries B_0..B_n with B_j = gamma_{n+1-j}."""
        out = np.empty(self.n + 1)
        out[0] = 0.0
        if self.n >= 1:
            out[1:] = -self.neg_gamma[1:][::-1]
        return out


def build_partition(weights: WeightTable, kernel: JumpKernel) -> SamplerPartition:
    """Bind the memory ladder of `weights` to a Markov kernel."""
    if abs(kernel.markov_mass - weights.markov_mass) > 1e-12:
        raise ValueError(
            f"kernel built for w_n = {kernel.markov_mass}, weights have "
            f"w_n = {weights.markov_mass}"
        )
    n = weights.n
    p1w = float(weights.gamma[1]) if n >= 1 else 0.0
    return SamplerPartition(
        n=n, p1_width=p1w, neg_gamma=-weights.gamma, kernel=kernel
    )


def sample_jump(kernel: JumpKernel, u) -> np.ndarray:
    """Map deviates in [0, w_n) to jump offsets (zero vector = stay).

    Accepts a scalar or an array; returns (N,) or (len(u), N) int arrays.
    """
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    idx = np.searchsorted(kernel.cumulative, u_arr, side="right")
    idx = np.minimum(idx, kernel.n_entries)  # guard the last-cut rounding sliver
    out = np.zeros((len(u_arr), kernel.geometry.N), dtype=np.int32)
    jumping = idx > 0
    out[jumping] = kernel.offsets[idx[jumping] - 1]
    return out[0] if np.isscalar(u) or np.ndim(u) == 0 else out


def revisit_indices(partition: SamplerPartition, u) -> np.ndarray:
    """Memory-cell indices m for deviates known to fall in P1."""
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    count = np.searchsorted(partition.neg_gamma[1:], -u_arr, side="left")
    return partition.n - count


def sample_step(partition: SamplerPartition, u: float) -> StepChoice:
    """Resolve one uniform deviate into a revisit or a Markov jump."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"deviate must lie in [0, 1), got {u}")
    if u < partition.p1_width:
        m = int(revisit_indices(partition, u)[0])
        return StepChoice.revisit(m)
    return StepChoice.jump(sample_jump(partition.kernel, u - partition.p1_width))
