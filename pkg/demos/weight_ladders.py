#!/usr/bin/env python3
# Memory-weight ladders for the explicit time stepping.
# The table w_0..w_n at step n splits one unit of probability between the
# current density (w_n, the Markov share) and every past level (the memory
# share 1 - w_n = 2^(1-beta) - 1 for the Caputo variant, = beta for GL).

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dodewalk import weight_table

N_STEP = 100

for beta in (0.999, 0.99, 0.9):
    t = weight_table(N_STEP, beta)
    print(f"beta={beta}: w_n={t.w[N_STEP]:.8f}  memory mass={1 - t.w[N_STEP]:.8f}")

# The oldest level (m=0) is not the least likely revisit target. For
# beta=0.9 the ladder dips below w_0 and only recrosses near the end:
t = weight_table(N_STEP, 0.9)
above = np.nonzero(t.w[1:N_STEP] > t.w[0])[0] + 1
print(f"beta=0.9, n={N_STEP}: w_m exceeds w_0 again from m={above.min()}")

fig, ax = plt.subplots(figsize=(6, 4))
for beta, marker in ((0.999, "."), (0.99, "+"), (0.9, "x")):
    for variant, ls in (("caputo", "-"), ("gl", "--")):
        t = weight_table(N_STEP, beta, variant=variant)
        ax.semilogy(np.arange(N_STEP), t.w[:N_STEP], ls, marker=marker,
                    ms=3, lw=0.8, label=f"{variant} beta={beta}")
ax.set_xlabel("past level m")
ax.set_ylabel("w_m")
ax.set_title(f"memory weights at step n={N_STEP} (w_n omitted)")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig("weight_ladders.png", dpi=120)
print("wrote weight_ladders.png")
