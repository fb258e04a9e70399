"""The boundary image g(e^{i theta}) is a fractal curve.

Plotting g along the circle at increasing resolution shows structure at
every scale: each zoom by 13 in theta reveals a new generation of loops.
"""
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ndpos import LacunarySeries

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)
g = LacunarySeries.from_ab(0.5, 13)

fig, axes = plt.subplots(1, 3, figsize=(12, 4))
for ax, width in zip(axes, (2 * np.pi, 2 * np.pi / 13, 2 * np.pi / 169)):
    theta = np.linspace(0.3, 0.3 + width, 20000)
    w = g.eval_angle(theta)
    ax.plot(w.real, w.imag, lw=0.3, color="k")
    ax.set_aspect("equal")
    ax.set_title(f"theta window {width:.4f}")
fig.savefig(OUT / "image_curve.png", dpi=120, bbox_inches="tight")
print("wrote", OUT / "image_curve.png")
