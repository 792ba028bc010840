"""Spatial jump rates on the integer lattice for order-alpha mixtures.

Each fractional order alpha in (0, 2) contributes a heavy-tailed rate

    q_k = a * b(alpha) / (|k|^(N+alpha) * h^alpha),        k != 0,

with b(alpha) = Gamma(1+alpha/2)^2 * sin(alpha*pi/2) / (pi^2 * 2^(N-alpha-1)).
b vanishes at alpha = 2, where the classical Laplacian takes over as the
nearest-neighbour stencil a/h^2 on the 2N unit offsets.  Offsets are
truncated to the Euclidean ball |k| <= K and grouped into shells of equal
squared radius; the shell table is what the transition law and the
density solver both consume.

All lengths are nanometers and times are seconds throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .timefrac import _check_beta

__all__ = [
    "SpectralMixture",
    "ShellTable",
    "LatticeGeometry",
    "b_coeff",
    "build_shells",
    "lattice_sum",
    "norm_constant",
    "q_coefficient",
    "shell_rates",
    "q_zero",
    "tail_report",
    "tau_for_p0",
    "tau_max",
    "stability_check",
]

MAX_OFFSETS = 2**25  # enumeration budget, ~34M lattice points

ALPHA_CLASSICAL = 2.0


class StabilityError(ValueError):
    """Step size violates the positivity bound of the scheme."""


@dataclass(frozen=True)
class SpectralMixture:
    """Multi-term order mixture sum_m a_m * D^{alpha_m} with time order beta.

    alphas must be strictly increasing in (0, 2]; coefficients a_m are in
    nm^alpha_m / s^beta and must be positive.
    """

    alphas: tuple[float, ...]
    coefs: tuple[float, ...]
    beta: float = 1.0

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        coefs = tuple(float(c) for c in self.coefs)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "coefs", coefs)
        object.__setattr__(self, "beta", _check_beta(self.beta))
        if len(alphas) == 0:
            raise ValueError("mixture needs at least one term")
        if len(alphas) != len(coefs):
            raise ValueError(
                f"got {len(alphas)} orders but {len(coefs)} coefficients"
            )
        if any(not 0.0 < a <= 2.0 for a in alphas):
            raise ValueError(f"orders must lie in (0, 2], got {alphas}")
        if any(x >= y for x, y in zip(alphas, alphas[1:])):
            raise ValueError(f"orders must be strictly increasing, got {alphas}")
        if any(c <= 0.0 for c in coefs):
            raise ValueError(f"coefficients must be positive, got {coefs}")

    @property
    def M(self) -> int:
        return len(self.alphas)


def b_coeff(alpha: float, N: int) -> float:
    """Lattice normalization b(alpha) of a single fractional order.

    Strictly positive on (0, 2) and exactly zero at alpha = 2, where the
    fractional rate degenerates and the classical stencil replaces it.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    if alpha == ALPHA_CLASSICAL:
        return 0.0
    g = math.gamma(1.0 + alpha / 2.0)
    return g * g * math.sin(alpha * math.pi / 2.0) / (
        math.pi**2 * 2.0 ** (N - alpha - 1.0)
    )


# === shell enumeration =================================================


@dataclass(frozen=True)
class ShellTable:
    """Offsets 0 < |k| <= K grouped by exact squared radius.

    offsets are ordered by (|k|^2 ascending, lexicographic within a
    shell); shell s covers offsets[start[s]:start[s+1]] and has squared
    radius r2[s].
    """

    N: int
    K: int
    offsets: np.ndarray  # (n_offsets, N) int32
    r2: np.ndarray       # (n_shells,) int64, ascending
    counts: np.ndarray   # (n_shells,) int64
    start: np.ndarray    # (n_shells+1,) int64 prefix index into offsets

    @property
    def radii(self) -> np.ndarray:
        """Euclidean shell radii sqrt(r2) as floats."""
        return np.sqrt(self.r2.astype(float))

    @property
    def n_offsets(self) -> int:
        return len(self.offsets)

    def shells(self):
        """Yield (r2, members) per shell, members a (count, N) view."""
        for s in range(len(self.r2)):
            yield int(self.r2[s]), self.offsets[self.start[s] : self.start[s + 1]]


def build_shells(N: int, K: int, max_offsets: int = MAX_OFFSETS) -> ShellTable:
    """Enumerate lattice offsets 0 < |k| <= K grouped into radius shells."""
    if N not in (1, 2):
        raise ValueError(f"dimension N must be 1 or 2, got {N}")
    K = int(K)
    if K < 1:
        raise ValueError(f"truncation radius K must be >= 1, got {K}")
    if (2 * K + 1) ** N > max_offsets:
        raise ValueError(
            f"shell table for N={N}, K={K} needs {(2*K+1)**N} candidate "
            f"offsets, over the budget of {max_offsets}"
        )
    r = np.arange(-K, K + 1, dtype=np.int32)
    if N == 1:
        pts = r[:, None]
    else:
        k1, k2 = np.meshgrid(r, r, indexing="ij")
        pts = np.column_stack([k1.ravel(), k2.ravel()])
    r2 = (pts.astype(np.int64) ** 2).sum(axis=1)
    keep = (r2 > 0) & (r2 <= K * K)
    pts, r2 = pts[keep], r2[keep]
    # sort by squared radius, then lexicographically within a shell
    order = np.lexsort(tuple(pts[:, i] for i in reversed(range(N))) + (r2,))
    pts, r2 = pts[order], r2[order]
    uniq, idx, counts = np.unique(r2, return_index=True, return_counts=True)
    start = np.concatenate([idx, [len(r2)]]).astype(np.int64)
    return ShellTable(N=N, K=K, offsets=pts, r2=uniq, counts=counts.astype(np.int64),
                      start=start)


@dataclass(frozen=True)
class LatticeGeometry:
    """Lattice spacing plus the truncated shell table."""

    N: int = 2
    h: float = 6.0  # nm
    K: int = 512
    shells: ShellTable = field(default=None, repr=False)

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError(f"lattice spacing h must be positive, got {self.h}")
        if self.shells is None:
            object.__setattr__(self, "shells", build_shells(self.N, self.K))
        elif (self.shells.N, self.shells.K) != (self.N, self.K):
            raise ValueError("shell table does not match N/K of the geometry")


# === lattice sums =======================================================


def norm_constant(N: int) -> float:
    """Surface constant C_N = 2 pi^(N/2) / Gamma(N/2) of the tail integral."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def lattice_sum(
    alpha: float,
    N: int,
    K: int,
    shells: ShellTable | None = None,
) -> tuple[float, float]:
    """Truncated sum R_K(alpha) = sum_{0<|k|<=K} |k|^-(N+alpha) plus tail bound.

    Returns (value, tail_bound) with tail_bound = C_N * K^-alpha / alpha,
    the integral-comparison overestimate of the neglected mass, so that
    value <= R(alpha) <= value + tail_bound.
    """
    if not 0.0 < alpha <= 2.0:
        raise ValueError(f"alpha must lie in (0, 2], got {alpha}")
    K = int(K)
    if N == 1 and shells is None:
        # direct integer sum; supports K far beyond any shell-table budget
        s = 1.0 + alpha
        value = 0.0
        step = 5_000_000
        for lo in range(1, K + 1, step):
            m = np.arange(lo, min(lo + step, K + 1), dtype=float)
            value += float(np.sum(m**-s))
        value *= 2.0
    else:
        if shells is None:
            shells = build_shells(N, K)
        value = float(np.dot(shells.counts.astype(float),
                             shells.radii ** -(N + alpha)))
    tail = norm_constant(N) * K**-alpha / alpha
    return value, tail


# === mixture rates ======================================================


def _term_factors(mixture: SpectralMixture, geometry: LatticeGeometry):
    """Per-term (a*b(alpha), alpha) for the fractional parts, plus the
    total classical stencil coefficient sum(a_m : alpha_m = 2)."""
    frac, classical = [], 0.0
    for alpha, a in zip(mixture.alphas, mixture.coefs):
        if alpha == ALPHA_CLASSICAL:
            classical += a
        else:
            frac.append((a * b_coeff(alpha, geometry.N), alpha))
    return frac, classical


def shell_rates(mixture: SpectralMixture, geometry: LatticeGeometry) -> np.ndarray:
    """Rate q per offset of each shell, shape (n_shells,).

    Fractional terms decay as |k|^-(N+alpha); any alpha = 2 term adds the
    classical a/h^2 stencil to the unit shell only.
    """
    sh = geometry.shells
    rad = sh.radii
    q = np.zeros(len(rad))
    frac, classical = _term_factors(mixture, geometry)
    for ab, alpha in frac:
        q += ab * rad ** -(geometry.N + alpha) * geometry.h**-alpha
    if classical > 0.0:
        q[0] += classical / geometry.h**2  # r2[0] == 1 always
    return q


def q_coefficient(k, mixture: SpectralMixture, geometry: LatticeGeometry) -> float:
    """Rate q_k for one offset k (any k with 0 < |k| <= K)."""
    k = np.asarray(k, dtype=np.int64)
    if k.shape != (geometry.N,):
        raise ValueError(f"offset must have shape ({geometry.N},), got {k.shape}")
    r2 = int((k**2).sum())
    if r2 == 0:
        raise ValueError("k = 0 is the stay cell, not a jump offset")
    if r2 > geometry.K**2:
        raise ValueError(f"|k|^2 = {r2} lies outside the truncation K = {geometry.K}")
    rad = math.sqrt(r2)
    frac, classical = _term_factors(mixture, geometry)
    q = 0.0
    for ab, alpha in frac:
        q += ab * rad ** -(geometry.N + alpha) * geometry.h**-alpha
    if classical > 0.0 and r2 == 1:
        q += classical / geometry.h**2
    return q


def q_zero(mixture: SpectralMixture, geometry: LatticeGeometry) -> float:
    """Total jump rate q_0 = sum over 0 < |k| <= K of q_k (plus stencil)."""
    q = shell_rates(mixture, geometry)
    return math.fsum(q * geometry.shells.counts.astype(float))


def tail_report(mixture: SpectralMixture, geometry: LatticeGeometry) -> dict:
    """Per-term truncated lattice sums and analytic tail bounds.

    The tail bound quantifies the rate mass neglected beyond K; it is
    reported, not folded back into the table, so the transition law stays
    exactly normalized against the truncated q_0.
    """
    N, K = geometry.N, geometry.K
    terms = []
    total_tail_rate = 0.0
    for alpha, a in zip(mixture.alphas, mixture.coefs):
        if alpha == ALPHA_CLASSICAL:
            terms.append({"alpha": alpha, "R_trunc": 0.0, "tail_bound": 0.0,
                          "tail_rate": 0.0})
            continue
        value, tail = lattice_sum(alpha, N, K, geometry.shells)
        tail_rate = a * b_coeff(alpha, N) * tail * geometry.h**-alpha
        total_tail_rate += tail_rate
        terms.append({"alpha": alpha, "R_trunc": value, "tail_bound": tail,
                      "tail_rate": tail_rate})
    return {"terms": terms, "tail_rate_total": total_tail_rate}


# === step-size bound ====================================================


def _nu_and_top(beta: float, variant: str) -> tuple[float, float]:
    """(nu, w_n) of the chosen discretization at any n >= 1."""
    if variant == "caputo":
        return math.gamma(2.0 - beta), 2.0 - 2.0 ** (1.0 - beta)
    if variant == "gl":
        return 1.0, beta
    raise ValueError(f"variant must be 'caputo' or 'gl', got {variant!r}")


def tau_for_p0(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    p0_target: float,
    variant: str = "caputo",
) -> float:
    """Step size tau that makes the stay probability equal p0_target.

    Inverts p_0 = w_n - nu tau^beta q_0, so tau = ((w_n - p0) / (nu q_0))
    ** (1/beta).  p0_target must satisfy 0 <= p0 < w_n; at beta = 1 this
    reduces to tau = (1 - p0)/q_0.
    """
    beta = mixture.beta
    nu, top = _nu_and_top(beta, variant)
    if not 0.0 <= p0_target < top:
        raise ValueError(
            f"p0_target must satisfy 0 <= p0 < w_n = {top} "
            f"(variant {variant}, beta {beta}), got {p0_target}"
        )
    q0 = q_zero(mixture, geometry)
    return ((top - p0_target) / (nu * q0)) ** (1.0 / beta)


def tau_max(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    variant: str = "caputo",
) -> float:
    """Largest stable step size (the p0 = 0 point)."""
    return tau_for_p0(mixture, geometry, 0.0, variant)


def stability_check(
    mixture: SpectralMixture,
    geometry: LatticeGeometry,
    tau: float,
    variant: str = "caputo",
) -> tuple[bool, float]:
    """Whether tau keeps every transition probability nonnegative.

    Returns (ok, margin) with margin = tau_max - tau.  A relative slack
    of 1e-12 absorbs round-trip rounding, so tau == tau_max passes.
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    t_max = tau_max(mixture, geometry, variant)
    return tau <= t_max * (1.0 + 1e-12), t_max - tau
