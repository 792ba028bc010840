"""Memory weights for the time-fractional part of the stepping scheme.

A derivative of order beta in (0, 1] discretizes into a convolution over
the full history: at step n the old densities u^0 .. u^{n-1} enter with
weights w_0 .. w_{n-1} while the current density carries w_n.  Two ladders
are supported:

* ``caputo``:  gamma_m = (m+1)^(1-beta) - m^(1-beta),
  c_m = gamma_{m-1} - gamma_m, prefactor nu = Gamma(2 - beta).
* ``gl`` (Grunwald-Letnikov):  c_m = |binom(beta, m)| via the recurrence
  c_m = c_{m-1} * (1 - (1 + beta)/m), gamma_m = 1 - sum_{i<=m} c_i,
  prefactor nu = 1.

Both map onto the step weights the same way,

    w_0 = gamma_n,   w_i = c_{n+1-i}   (i = 1..n),

so w_n = c_1 and the table telescopes to sum exactly gamma_0 = 1.  At
beta = 1 every memory weight vanishes identically (w_n = 1) and the
scheme degenerates to a plain Markov chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "VARIANTS",
    "WeightTable",
    "WeightLadder",
    "caputo_weights",
    "gl_weights",
    "weight_table",
    "emit_weight_profile",
]

VARIANTS = ("caputo", "gl")


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise ValueError(f"beta must lie in (0, 1], got {beta}")
    return beta


@dataclass(frozen=True)
class WeightTable:
    """Memory weights w_0..w_n frozen for one step index n.

    Attributes
    ----------
    beta : float
        Fractional time order in (0, 1].
    variant : str
        "caputo" or "gl".
    n : int
        Step index; the table has n+1 entries.
    w : ndarray, shape (n+1,)
        w[m] multiplies the density at time m in the update for time n+1;
        w[n] is the Markovian mass.
    nu : float
        Prefactor of tau^beta in the jump probabilities (Gamma(2-beta)
        for caputo, 1 for gl).
    gamma : ndarray, shape (n+1,)
        The gamma ladder gamma_0..gamma_n.  Prefix sums of w collapse to
        B_j = gamma_{n+1-j}, so samplers can binary-search this array
        instead of rebuilding cut vectors every step.
    """

    beta: float
    variant: str
    n: int
    w: np.ndarray
    nu: float
    gamma: np.ndarray

    @property
    def markov_mass(self) -> float:
        """w_n, the total probability of the Markovian branch."""
        return float(self.w[-1])

    @property
    def nonmarkov_mass(self) -> float:
        """1 - w_n, the probability of revisiting a recorded position."""
        return 1.0 - self.markov_mass


class WeightLadder:
    """Incrementally extendable gamma/c arrays behind :class:`WeightTable`.

    The walk engine and the density solver both step n upward one unit at
    a time; this object grows the underlying coefficient arrays on demand
    (vectorized, amortized O(1) per step) so per-step tables are cheap
    views instead of fresh O(n) recomputations.
    """

    def __init__(self, beta: float, variant: str = "caputo"):
        self.beta = _check_beta(beta)
        if variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
        self.variant = variant
        self.nu = math.gamma(2.0 - self.beta) if variant == "caputo" else 1.0
        # index 0 holds gamma_0 = 1; c[0] is a placeholder, c_m starts at m=1
        self._gamma = np.array([1.0])
        self._c = np.array([np.nan])

    @property
    def size(self) -> int:
        """Largest m for which gamma_m / c_m are available."""
        return len(self._gamma) - 1

    def ensure(self, n: int) -> None:
        """Extend the ladders so indices up to n are valid."""
        if n <= self.size:
            return
        m = np.arange(1, n + 1, dtype=float)
        if self.variant == "caputo":
            # (m+1)^(1-beta) - m^(1-beta) without cancellation at large m
            gam = m ** (1.0 - self.beta) * np.expm1(
                (1.0 - self.beta) * np.log1p(1.0 / m)
            )
            c = -np.diff(gam, prepend=1.0)
        else:
            factors = 1.0 - (1.0 + self.beta) / m
            factors[0] = self.beta  # seed c_1 = beta
            c = np.cumprod(factors)
            gam = 1.0 - np.cumsum(c)
        self._gamma = np.concatenate(([1.0], gam))
        self._c = np.concatenate(([np.nan], c))

    def gamma(self, n: int) -> np.ndarray:
        """View of gamma_0..gamma_n."""
        self.ensure(n)
        return self._gamma[: n + 1]

    def markov_mass(self, n: int) -> float:
        """w_n for step index n (c_1 for n >= 1, gamma_0 = 1 at n = 0)."""
        if n == 0:
            return 1.0
        self.ensure(1)
        return float(self._c[1])

    def table(self, n: int) -> WeightTable:
        """Materialize the full WeightTable for step index n."""
        if n < 0:
            raise ValueError(f"step index n must be >= 0, got {n}")
        self.ensure(n)
        w = np.empty(n + 1)
        w[0] = self._gamma[n]
        if n >= 1:
            w[1:] = self._c[1 : n + 1][::-1]
        w += 0.0  # beta = 1 yields -0.0 entries; normalize the sign
        return WeightTable(
            beta=self.beta,
            variant=self.variant,
            n=n,
            w=w,
            nu=self.nu,
            gamma=self._gamma[: n + 1].copy(),
        )


def weight_table(n: int, beta: float, variant: str = "caputo") -> WeightTable:
    """Build the weight table for step index n from scratch."""
    return WeightLadder(beta, variant).table(n)


def caputo_weights(n: int, beta: float) -> WeightTable:
    """Caputo-discretization weights for step index n."""
    return weight_table(n, beta, "caputo")


def gl_weights(n: int, beta: float) -> WeightTable:
    """Grunwald-Letnikov weights for step index n."""
    return weight_table(n, beta, "gl")


def emit_weight_profile(table: WeightTable) -> np.ndarray:
    """Two-column array (m, w_m) suitable for plotting or CSV dumps.

    Row 0 and row n carry the horizontal reference values w_0 and w_n.
    """
    out = np.empty((table.n + 1, 2))
    out[:, 0] = np.arange(table.n + 1)
    out[:, 1] = table.w
    return out
