"""Difference quotients of the lacunary seed blow up along the unit circle.

g(z) = sum 0.5**n z**(13**n) is continuous on the closed disc but its
boundary values are nowhere differentiable.  We measure the largest
quotient |g(z) - g(z0)| / |z - z0| in shrinking windows around 16 circle
points and watch ln M_k climb with the window index k.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ndpos import LacunarySeries, ScaleLadder, certify_blowup, default_thresholds, grid_J, profile_grid
from ndpos.domains import make_unit_disc

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

g = LacunarySeries.from_ab(0.5, 13)
disc = make_unit_disc()
ladder = ScaleLadder(0.3, 1 / 13, 6, 256)   # windows shrink by the base b
slope_min, M_crit = default_thresholds(g.params)
print(f"thresholds: slope_min={slope_min:.3g}  M_crit={M_crit:.3g}")

profiles = profile_grid(g, disc, grid_J(disc, 16), ladder)
for p in profiles:
    c = certify_blowup(p, slope_min, M_crit)
    print(f"theta={np.angle(p.z0.point):+.3f}  M_1={p.M[0]:9.3g}  M_6={p.M[-1]:9.3g}"
          f"  slope={c.growth_slope:.2f}  certified={c.passed}")

# Each refinement multiplies M_k by roughly b**(1 - alpha) with alpha = ln 2 / ln 13.
ratios = np.array([p.M[-1] / p.M[-2] for p in profiles])
print(f"median step ratio {np.median(ratios):.2f}, Hoelder prediction {13 ** (1 - np.log(2) / np.log(13)):.2f}")

fig, ax = plt.subplots(figsize=(6, 4))
for p in profiles:
    ax.plot(np.arange(1, 7), np.log(p.as_array()), marker="o", lw=0.8)
ax.set_xlabel("window index k")
ax.set_ylabel("ln M_k")
fig.savefig(OUT / "disc_blowup.png", dpi=120, bbox_inches="tight")
