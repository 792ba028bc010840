#!/usr/bin/env python3
# Individual 2D trajectories at video rate (tau set by the stability
# limit, horizon 1/30 s). Left to right: classical, pure Levy, mixed.
# With beta < 1 a small fraction of steps revisit an earlier position;
# those are drawn as open circles.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from dodewalk import LatticeGeometry, SpectralMixture, run_walk, tau_max

BETA = 0.999
T_S = 1.0 / 30.0
geo = LatticeGeometry(N=2, h=6.0, K=26)

panels = [
    ("alpha=2", (2.0,)),
    ("alpha=1.5", (1.5,)),
    ("alpha={1.5,2}", (1.5, 2.0)),
]

fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, (label, alphas) in zip(axes, panels):
    coefs = tuple(9.0e6 / len(alphas) for _ in alphas)
    mix = SpectralMixture(alphas=alphas, coefs=coefs, beta=BETA)
    tau = tau_max(mix, geo)
    n = int(T_S / tau)
    traj = run_walk(mix, geo, tau, n, seed=5, walker=1)
    xy = traj.positions_nm
    ax.plot(xy[:, 0], xy[:, 1], "-", lw=0.5, color="tab:blue")
    rev = traj.kinds == 2
    if rev.any():
        ax.plot(xy[1:][rev, 0], xy[1:][rev, 1], "o", ms=4, mfc="none",
                mec="tab:red", label=f"{int(rev.sum())} revisits")
        ax.legend(fontsize=7)
    ax.plot(0, 0, "k+", ms=8)
    ax.set_title(f"{label}, {n} steps")
    ax.set_aspect("equal")
    ax.set_xlabel("x (nm)")
    counts = traj.kind_counts()
    print(f"{label}: n={n} tau={tau:.3e}s kinds={counts}")
axes[0].set_ylabel("y (nm)")
fig.tight_layout()
fig.savefig("single_trajectories.png", dpi=120)
print("wrote single_trajectories.png")
