"""Monte Carlo engine for the memory-carrying lattice walk.

One uniform deviate per walker per step decides everything: deviates
below gamma_1 pick a remembered position to revisit (binary search on
the gamma ladder), the rest shift into the Markov branch and pick a
stay or a jump offset from the kernel's cumulative table.

Determinism contract.  Walkers are processed in chunks of 4096 lanes.
The deviates for (seed, step, chunk) come from a dedicated Philox
stream keyed as

    key = seed * 2^64 + step * 2^24 + block * 2^23 + chunk,

so any walker's draw sequence is independent of ensemble size, thread
count, and whether it is replayed alone (counter-based streams have the
prefix property: lane i of a chunk always sees the same variate).
Block 1 carries the barrier escape deviates so that both blocks keep
the prefix property.  Scalar accumulators are reduced per chunk first
and then combined in fixed chunk order with math.fsum; threads only
ever claim whole chunks.  Reruns are therefore byte-identical.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .spacefrac import LatticeGeometry, SpectralMixture
from .timefrac import WeightLadder
from .transition import JumpKernel, build_kernel

__all__ = [
    "CHUNK",
    "BarrierSpec",
    "EnsembleResult",
    "Trajectory",
    "barrier_walk",
    "run_ensemble",
    "run_walk",
]

CHUNK = 4096
_STEP_SHIFT = 24
_BLOCK_BIT = 1 << 23       # separates step deviates from escape deviates
_MAX_CHUNKS = 1 << 23

KIND_STAY = 0
KIND_JUMP = 1
KIND_REVISIT = 2
KIND_BLOCKED_JUMP = 3
KIND_BLOCKED_REVISIT = 4

KIND_NAMES = ("stay", "jump", "revisit", "blocked-jump", "blocked-revisit")


def _stream(seed: int, step: int, chunk: int, block: int = 0) -> np.random.Generator:
    key = (seed << 64) | (step << _STEP_SHIFT) | (block * _BLOCK_BIT) | chunk
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class BarrierSpec:
    """Square compartment grid: period_sites sites per cell edge.

    A move whose destination lies in a different cell than its origin
    only succeeds when the walker's escape deviate falls below
    p_escape; otherwise the walker keeps its position for that step.
    The first cell is centered on the origin.
    """

    period_sites: int
    p_escape: float

    def __post_init__(self) -> None:
        if self.period_sites < 1:
            raise ValueError("period_sites must be a positive integer")
        if not 0.0 <= self.p_escape <= 1.0:
            raise ValueError(f"p_escape must lie in [0, 1], got {self.p_escape}")

    def cells(self, pos: np.ndarray) -> np.ndarray:
        return (pos + self.period_sites // 2) // self.period_sites


def _build_kernels(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    variant: str,
    n_steps: int,
) -> tuple[JumpKernel, JumpKernel, np.ndarray, float, bool]:
    """Kernels for step 0 and for every later step, plus the gamma ladder."""
    ladder = WeightLadder(mixture.beta, variant)
    ladder.ensure(max(n_steps, 1))
    k0 = build_kernel(mixture, geometry, tau, ladder.table(0))
    t1 = ladder.table(1)
    has_memory = t1.nonmarkov_mass > 0.0
    k1 = k0 if not has_memory else build_kernel(mixture, geometry, tau, t1)
    gamma = ladder.gamma(n_steps).copy()
    return k0, k1, -gamma, float(gamma[1]), has_memory


def _sample_markov(kernel: JumpKernel, v: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(kernel.cumulative, v, side="right")
    return np.minimum(idx, kernel.n_entries)


@dataclass
class _Partials:
    """Per-chunk accumulators, merged later in fixed chunk order."""

    n_stay: int = 0
    n_jump: int = 0
    n_revisit: int = 0
    n_blocked_jump: int = 0
    n_blocked_revisit: int = 0
    move_disp_sum: float = 0.0
    move_disp_sqsum: float = 0.0
    jump_len_sum: float = 0.0
    msd: np.ndarray | None = None


def _simulate_chunk(
    chunk: int,
    lanes: int,
    seed: int,
    n_steps: int,
    kernel0: JumpKernel,
    kernel1: JumpKernel,
    neg_gamma: np.ndarray,
    gamma1: float,
    has_memory: bool,
    barrier: BarrierSpec | None,
    out_final: np.ndarray,
) -> _Partials:
    N = kernel0.geometry.N
    h = kernel0.geometry.h
    pos = np.zeros((lanes, N), dtype=np.int32)
    hist = (
        np.zeros((n_steps + 1, lanes, N), dtype=np.int32) if has_memory else None
    )
    part = _Partials(msd=np.zeros(n_steps + 1))
    lane_ids = np.arange(lanes)

    for n in range(n_steps):
        u = _stream(seed, n, chunk).random(lanes)
        esc = _stream(seed, n, chunk, block=1).random(lanes) if barrier else None
        kern = kernel0 if n == 0 else kernel1
        p1w = gamma1 if (has_memory and n >= 1) else 0.0

        if p1w > 0.0:
            rev = u < p1w
            rev_idx = lane_ids[rev]
        else:
            rev = None
            rev_idx = lane_ids[:0]

        if rev_idx.size:
            m = n - np.searchsorted(neg_gamma[1 : n + 1], -u[rev_idx], side="left")
            dest = hist[m, rev_idx]
            old = pos[rev_idx]
            step_nm = (dest - old).astype(float) * h
            dl = np.sqrt((step_nm**2).sum(axis=1))
            if barrier is not None:
                crossing = (barrier.cells(dest) != barrier.cells(old)).any(axis=1)
                blocked = crossing & (esc[rev_idx] >= barrier.p_escape)
                dest[blocked] = old[blocked]
                dl = dl[~blocked]
                part.n_blocked_revisit += int(blocked.sum())
                part.n_revisit += int((~blocked).sum())
            else:
                part.n_revisit += rev_idx.size
            pos[rev_idx] = dest
            part.move_disp_sum += float(dl.sum())
            part.move_disp_sqsum += float((dl**2).sum())

        mar_idx = lane_ids if rev is None else lane_ids[~rev]
        v = u[mar_idx] - p1w
        idx = _sample_markov(kern, v)
        jm = idx > 0
        jump_lanes = mar_idx[jm]
        part.n_stay += int(mar_idx.size - jump_lanes.size)
        if jump_lanes.size:
            delta = kern.offsets[idx[jm] - 1]
            lens = kern.lengths_nm[idx[jm] - 1]
            if barrier is not None:
                old = pos[jump_lanes]
                new = old + delta
                crossing = (barrier.cells(new) != barrier.cells(old)).any(axis=1)
                blocked = crossing & (esc[jump_lanes] >= barrier.p_escape)
                new[blocked] = old[blocked]
                pos[jump_lanes] = new
                lens = lens[~blocked]
                part.n_blocked_jump += int(blocked.sum())
                part.n_jump += int((~blocked).sum())
            else:
                pos[jump_lanes] += delta
                part.n_jump += jump_lanes.size
            part.jump_len_sum += float(lens.sum())
            part.move_disp_sum += float(lens.sum())
            part.move_disp_sqsum += float((lens**2).sum())

        if has_memory:
            hist[n + 1] = pos
        posf = pos.astype(float)
        part.msd[n + 1] = np.einsum("ij,ij->", posf, posf) * h * h

    out_final[:] = pos
    return part


@dataclass(frozen=True)
class EnsembleResult:
    """Final positions plus deterministic whole-run accumulators."""

    geometry: LatticeGeometry
    tau: float
    n_steps: int
    n_walkers: int
    seed: int
    variant: str
    beta: float
    final: np.ndarray          # (n_walkers, N) int32, lattice coordinates
    msd_nm2: np.ndarray        # (n_steps + 1,) ensemble mean of |x|^2
    n_stay: int
    n_jump: int
    n_revisit: int
    n_blocked_jump: int
    n_blocked_revisit: int
    move_disp_sum_nm: float
    move_disp_sqsum_nm2: float
    jump_len_sum_nm: float

    @property
    def n_moves(self) -> int:
        return self.n_jump + self.n_revisit

    @property
    def avg_move_nm(self) -> float:
        """Mean displacement per completed move (stays and blocks excluded)."""
        return self.move_disp_sum_nm / self.n_moves

    @property
    def avg_move_se_nm(self) -> float:
        """Standard error of avg_move_nm."""
        mean = self.avg_move_nm
        var = self.move_disp_sqsum_nm2 / self.n_moves - mean * mean
        return math.sqrt(max(var, 0.0) / self.n_moves)

    @property
    def avg_jump_nm(self) -> float:
        """Mean kernel jump length, revisits excluded."""
        return self.jump_len_sum_nm / self.n_jump

    @property
    def nonmarkov_fraction(self) -> float:
        """Fraction of all steps resolved through the memory branch."""
        total = self.n_walkers * self.n_steps
        return (self.n_revisit + self.n_blocked_revisit) / total


def run_ensemble(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    n_steps: int,
    n_walkers: int,
    seed: int = 0,
    *,
    variant: str = "caputo",
    threads: int = 1,
    barrier: BarrierSpec | None = None,
) -> EnsembleResult:
    """Simulate n_walkers independent walks of n_steps updates each.

    Results are invariant to `threads`: the thread pool only changes
    which worker computes a chunk, never the chunk's stream or the
    order partial results are merged in.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if n_walkers < 1:
        raise ValueError(f"n_walkers must be >= 1, got {n_walkers}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must fit in an unsigned 64-bit integer")
    k0, k1, neg_gamma, gamma1, has_memory = _build_kernels(
        mixture, geometry, tau, variant, n_steps
    )
    n_chunks = (n_walkers + CHUNK - 1) // CHUNK
    if n_chunks > _MAX_CHUNKS:
        raise ValueError(f"n_walkers exceeds the {_MAX_CHUNKS * CHUNK} walker limit")
    final = np.empty((n_walkers, geometry.N), dtype=np.int32)

    def job(chunk: int) -> _Partials:
        lo = chunk * CHUNK
        hi = min(lo + CHUNK, n_walkers)
        return _simulate_chunk(
            chunk, hi - lo, seed, n_steps, k0, k1, neg_gamma, gamma1,
            has_memory, barrier, final[lo:hi],
        )

    if threads > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(job, range(n_chunks)))
    else:
        parts = [job(c) for c in range(n_chunks)]

    msd = np.sum([p.msd for p in parts], axis=0) / n_walkers
    return EnsembleResult(
        geometry=geometry,
        tau=float(tau),
        n_steps=n_steps,
        n_walkers=n_walkers,
        seed=seed,
        variant=variant,
        beta=mixture.beta,
        final=final,
        msd_nm2=msd,
        n_stay=sum(p.n_stay for p in parts),
        n_jump=sum(p.n_jump for p in parts),
        n_revisit=sum(p.n_revisit for p in parts),
        n_blocked_jump=sum(p.n_blocked_jump for p in parts),
        n_blocked_revisit=sum(p.n_blocked_revisit for p in parts),
        move_disp_sum_nm=math.fsum(p.move_disp_sum for p in parts),
        move_disp_sqsum_nm2=math.fsum(p.move_disp_sqsum for p in parts),
        jump_len_sum_nm=math.fsum(p.jump_len_sum for p in parts),
    )


@dataclass(frozen=True)
class Trajectory:
    """Single-walker path with a per-step event record.

    positions holds lattice coordinates for levels 0..n_steps; row n of
    the event arrays describes the transition from level n to n + 1.
    revisit_m is -1 except for (blocked) revisits, where it names the
    remembered level that was drawn.
    """

    geometry: LatticeGeometry
    tau: float
    seed: int
    walker: int
    variant: str
    beta: float
    positions: np.ndarray      # (n_steps + 1, N) int32
    kinds: np.ndarray          # (n_steps,) int8, KIND_* codes
    offsets: np.ndarray        # (n_steps, N) int32, zero unless a jump
    revisit_m: np.ndarray      # (n_steps,) int32
    disp_nm: np.ndarray        # (n_steps,) float, 0 for stays and blocks

    @property
    def n_steps(self) -> int:
        return len(self.kinds)

    @property
    def times_s(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.tau

    @property
    def positions_nm(self) -> np.ndarray:
        return self.positions * self.geometry.h

    def kind_counts(self) -> dict[str, int]:
        return {
            name: int((self.kinds == code).sum())
            for code, name in enumerate(KIND_NAMES)
        }


def run_walk(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    n_steps: int,
    seed: int = 0,
    walker: int = 0,
    *,
    variant: str = "caputo",
    barrier: BarrierSpec | None = None,
) -> Trajectory:
    """Replay one walker with full event records.

    The walker sees exactly the deviates it would see inside
    run_ensemble with the same seed, so ensembles can be audited one
    lane at a time.
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if walker < 0 or walker >= _MAX_CHUNKS * CHUNK:
        raise ValueError(f"walker index {walker} out of range")
    k0, k1, neg_gamma, gamma1, has_memory = _build_kernels(
        mixture, geometry, tau, variant, n_steps
    )
    chunk, lane = divmod(walker, CHUNK)
    N = geometry.N
    positions = np.zeros((n_steps + 1, N), dtype=np.int32)
    kinds = np.zeros(n_steps, dtype=np.int8)
    offsets = np.zeros((n_steps, N), dtype=np.int32)
    revisit_m = np.full(n_steps, -1, dtype=np.int32)
    disp = np.zeros(n_steps)

    for n in range(n_steps):
        u = float(_stream(seed, n, chunk).random(lane + 1)[lane])
        esc = (
            float(_stream(seed, n, chunk, block=1).random(lane + 1)[lane])
            if barrier
            else None
        )
        kern = k0 if n == 0 else k1
        p1w = gamma1 if (has_memory and n >= 1) else 0.0
        cur = positions[n]
        if u < p1w:
            m = n - int(
                np.searchsorted(neg_gamma[1 : n + 1], -u, side="left")
            )
            dest = positions[m]
            crossing = barrier is not None and bool(
                (barrier.cells(dest) != barrier.cells(cur)).any()
            )
            if crossing and esc >= barrier.p_escape:
                kinds[n] = KIND_BLOCKED_REVISIT
                revisit_m[n] = m
                positions[n + 1] = cur
            else:
                kinds[n] = KIND_REVISIT
                revisit_m[n] = m
                positions[n + 1] = dest
                disp[n] = float(
                    np.sqrt((((dest - cur) * geometry.h) ** 2).sum())
                )
        else:
            idx = int(_sample_markov(kern, np.array([u - p1w]))[0])
            if idx == 0:
                kinds[n] = KIND_STAY
                positions[n + 1] = cur
            else:
                off = kern.offsets[idx - 1]
                new = cur + off
                crossing = barrier is not None and bool(
                    (barrier.cells(new) != barrier.cells(cur)).any()
                )
                if crossing and esc >= barrier.p_escape:
                    kinds[n] = KIND_BLOCKED_JUMP
                    offsets[n] = off
                    positions[n + 1] = cur
                else:
                    kinds[n] = KIND_JUMP
                    offsets[n] = off
                    positions[n + 1] = new
                    disp[n] = float(kern.lengths_nm[idx - 1])

    return Trajectory(
        geometry=geometry,
        tau=float(tau),
        seed=seed,
        walker=walker,
        variant=variant,
        beta=mixture.beta,
        positions=positions,
        kinds=kinds,
        offsets=offsets,
        revisit_m=revisit_m,
        disp_nm=disp,
    )


def barrier_walk(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    n_steps: int,
    barrier: BarrierSpec,
    seed: int = 0,
    walker: int = 0,
    *,
    variant: str = "caputo",
) -> Trajectory:
    """run_walk inside a compartment grid; kept as a named entry point."""
    return run_walk(
        mixture, geometry, tau, n_steps, seed, walker,
        variant=variant, barrier=barrier,
    )
