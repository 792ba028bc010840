"""Explicit finite-difference evolution of the walker density.

The density update mirrors the sampler exactly: the top weight's worth
of mass moves through the jump kernel (stay included), and every older
time level m < n feeds back its density with weight w_m,

    u^{n+1} = sum_{m<n} w_m u^m + (p_0 u^n + sum_k p_k shift_k u^n).

Everything lives on a finite window [-J, J]^N of the lattice.  The
convolution is computed on the padded "full" support first, so the mass
that crosses the window edge is measured, not silently lost; it is
dropped from the state and recorded per step.  Memory feedback is
site-local and never leaks.

Two convolution paths produce identical results up to rounding: a
direct shift-and-add loop, exact for dyadic kernels like the classical
alpha = 2 stencil, and scipy's FFT convolution once the kernel has too
many entries for slicing to be sensible.  The direct path is also what
keeps the two-step hand calculation reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .spacefrac import LatticeGeometry, SpectralMixture, StabilityError
from .timefrac import WeightLadder
from .transition import JumpKernel, build_kernel

__all__ = [
    "DensityGrid",
    "FDResult",
    "WindowLossError",
    "fd_run",
    "fd_step",
]

# below this many kernel entries the shift-and-add loop beats the FFT
# and keeps dyadic arithmetic exact
DIRECT_ENTRY_LIMIT = 64

# FFT round-off shows up as ~1e-17 negatives; anything worse is a bug
NEGATIVE_TOL = 1e-12


class WindowLossError(StabilityError):
    """Raised when boundary leakage exceeds the configured budget."""


@dataclass(frozen=True)
class DensityGrid:
    """Finite window [-J, J]^N in lattice coordinates, spacing h nm."""

    N: int
    J: int
    h: float

    @property
    def shape(self) -> tuple[int, ...]:
        return (2 * self.J + 1,) * self.N

    @property
    def n_sites(self) -> int:
        return (2 * self.J + 1) ** self.N

    def axis_sites(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1)

    def axis_nm(self) -> np.ndarray:
        return self.axis_sites() * self.h

    def delta(self) -> np.ndarray:
        """Unit point mass at the origin."""
        u = np.zeros(self.shape)
        u[(self.J,) * self.N] = 1.0
        return u


class _ConvEngine:
    """One-window linear convolution with a fixed jump kernel."""

    def __init__(self, kernel: JumpKernel, window_shape: tuple[int, ...]):
        offs = kernel.offsets
        if len(offs):
            self.pad = np.abs(offs).max(axis=0)
        else:
            self.pad = np.zeros(kernel.geometry.N, dtype=np.int64)
        self.window_shape = window_shape
        self.full_shape = tuple(
            w + 2 * int(p) for w, p in zip(window_shape, self.pad)
        )
        self.kernel = kernel
        # leaked mass is summed over this frame only, so an empty frame
        # reports a loss of exactly zero
        self.frame_mask = np.ones(self.full_shape, dtype=bool)
        self.frame_mask[self.crop_slices()] = False
        self.direct = kernel.n_entries <= DIRECT_ENTRY_LIMIT
        if not self.direct:
            shape = tuple(2 * int(p) + 1 for p in self.pad)
            dense = np.zeros(shape)
            center = tuple(int(p) for p in self.pad)
            dense[center] = kernel.p0
            idx = tuple((offs[:, d] + int(self.pad[d])) for d in range(offs.shape[1]))
            dense[idx] = kernel.probs
            self.dense = dense

    def crop_slices(self) -> tuple[slice, ...]:
        return tuple(
            slice(int(p), int(p) + w) for p, w in zip(self.pad, self.window_shape)
        )

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Full-support convolution of the window with the kernel."""
        if self.direct:
            full = np.zeros(self.full_shape)
            base = tuple(int(p) for p in self.pad)
            if self.kernel.p0 > 0.0:
                sl = tuple(slice(b, b + w) for b, w in zip(base, self.window_shape))
                full[sl] += self.kernel.p0 * u
            for off, p in zip(self.kernel.offsets, self.kernel.probs):
                sl = tuple(
                    slice(b + int(k), b + int(k) + w)
                    for b, k, w in zip(base, off, self.window_shape)
                )
                full[sl] += p * u
            return full
        full = fftconvolve(u, self.dense, mode="full")
        lowest = full.min()
        if lowest < 0.0:
            if lowest < -NEGATIVE_TOL:
                raise FloatingPointError(
                    f"convolution produced mass {lowest}, beyond round-off"
                )
            np.maximum(full, 0.0, out=full)
        return full


@dataclass(frozen=True)
class FDResult:
    """Terminal density plus the mass ledger of the whole run."""

    grid: DensityGrid
    u: np.ndarray              # (2J+1)^N window, final time level
    tau: float
    n_steps: int
    beta: float
    variant: str
    masses: np.ndarray         # (n_steps + 1,), window mass per level
    loss_steps: np.ndarray     # (n_steps,), mass crossing the edge per step
    ledger_defect_max: float   # worst per-step conservation defect
    history: np.ndarray | None = None   # (n_steps + 1, n_sites) if kept

    @property
    def mass(self) -> float:
        return float(self.masses[-1])

    @property
    def loss_total(self) -> float:
        return float(self.loss_steps.sum())

    def level(self, n: int) -> np.ndarray:
        if self.history is None:
            raise ValueError("run was executed without keep_history")
        return self.history[n].reshape(self.grid.shape)


def fd_step(u: np.ndarray, kernel: JumpKernel) -> tuple[np.ndarray, float]:
    """Apply the Markov part of one update to a density window.

    Returns the same-shape window and the mass that left it.  Memory
    feedback, when present, is the caller's separate site-local add.
    """
    engine = _ConvEngine(kernel, u.shape)
    full = engine.apply(u)
    crop = full[engine.crop_slices()].copy()
    loss = float(np.sum(full, where=engine.frame_mask, initial=0.0))
    return crop, loss


def fd_run(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    n_steps: int,
    J: int,
    *,
    variant: str = "caputo",
    u0: np.ndarray | None = None,
    loss_tol: float = 1e-3,
    keep_history: bool | None = None,
) -> FDResult:
    """Evolve a point mass (or `u0`) for n_steps updates of size tau.

    loss_tol bounds the cumulative boundary leakage; crossing it aborts
    the run, since a window that small no longer approximates the free
    lattice.  keep_history defaults to whatever the memory term needs
    (all levels for beta < 1, nothing otherwise).
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    grid = DensityGrid(N=geometry.N, J=J, h=geometry.h)
    ladder = WeightLadder(mixture.beta, variant)
    ladder.ensure(max(n_steps, 1))
    kernel0 = build_kernel(mixture, geometry, tau, ladder.table(0))
    kernel1 = kernel0 if n_steps == 1 else build_kernel(
        mixture, geometry, tau, ladder.table(1)
    )
    engine0 = _ConvEngine(kernel0, grid.shape)
    engine1 = engine0 if n_steps == 1 else _ConvEngine(kernel1, grid.shape)

    has_memory = ladder.gamma(1)[1] > 0.0 if n_steps > 1 else False
    if keep_history is None:
        keep_history = has_memory
    store = keep_history or has_memory

    u = grid.delta() if u0 is None else np.array(u0, dtype=float)
    if u.shape != grid.shape:
        raise ValueError(f"u0 shape {u.shape} does not match window {grid.shape}")

    masses = np.empty(n_steps + 1)
    loss_steps = np.empty(n_steps)
    masses[0] = float(u.sum())
    history = np.empty((n_steps + 1, grid.n_sites)) if store else None
    if store:
        history[0] = u.ravel()

    gam = ladder.gamma(n_steps)
    c = np.empty(n_steps + 1)
    c[0] = np.nan
    c[1:] = gam[:-1] - gam[1:] if n_steps >= 1 else ()

    defect_max = 0.0
    cum_loss = 0.0
    for n in range(n_steps):
        engine = engine0 if n == 0 else engine1
        full = engine.apply(u)
        crop = full[engine.crop_slices()]
        loss = float(np.sum(full, where=engine.frame_mask, initial=0.0))
        u_next = crop if crop.base is None else crop.copy()
        w_mem = None
        if has_memory and n >= 1:
            # w^{(n)}_m coefficients for m = 0..n-1: gamma_n, c_n, ..., c_2
            w_mem = np.empty(n)
            w_mem[0] = gam[n]
            if n >= 2:
                w_mem[1:] = c[2 : n + 1][::-1]
            u_next = u_next + (w_mem @ history[:n]).reshape(grid.shape)
        masses[n + 1] = float(u_next.sum())
        loss_steps[n] = loss
        cum_loss += loss
        # one-step conservation: new mass + leakage = weighted old levels
        expected = (1.0 if n == 0 else c[1]) * masses[n]
        if w_mem is not None:
            expected += float(w_mem @ masses[:n])
        defect_max = max(defect_max, abs(expected - loss - masses[n + 1]))
        if cum_loss > loss_tol:
            raise WindowLossError(
                f"boundary leakage {cum_loss} exceeded loss_tol={loss_tol} "
                f"at step {n + 1} of {n_steps}; enlarge J or shorten the run"
            )
        u = u_next
        if store:
            history[n + 1] = u.ravel()

    return FDResult(
        grid=grid,
        u=u,
        tau=float(tau),
        n_steps=n_steps,
        beta=mixture.beta,
        variant=variant,
        masses=masses,
        loss_steps=loss_steps,
        ledger_defect_max=defect_max,
        history=history if keep_history else None,
    )
