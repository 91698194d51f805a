"""Halve alpha until the P1 solution stops being monotone.

With the consistent mass matrix the discrete solution develops negative
values once alpha gets too small relative to h.
"""
# %%
from eikonal_fem import RunConfig, alpha_sweep

for level in range(3):
    sweep = alpha_sweep(RunConfig(level=level))
    flags = " ".join("+" if r.monotone else "-" for r in sweep.per_alpha)
    print(f"level {level}: k=3..8 [{flags}]  selected alpha = 2^-{sweep.selected_result.k}")

# %%
# The smallest interior value tells how badly monotonicity breaks.
for r in sweep.per_alpha:
    print(f"k={r.k}: v in [{r.v_min_interior:.3e}, {r.v_max_interior:.3e}]")
