"""Rational perturbations cannot smooth the boundary.

Adding a rational q with poles off the closed disc changes quotients by at
most max |q'|, a finite amount, so blowup of g survives in g + q.  Turned
around, g is far from every rational function with fixed poles, and least
squares fits on the circle stall well above zero: the z**13 term and
everything after it sit outside any low-degree family.
"""
import numpy as np

from ndpos import LacunarySeries, ScaleLadder, default_thresholds, grid_J
from ndpos.domains import make_unit_disc
from ndpos.perturb import RationalFunction, fit_fixed_poles, perturbation_invariance, random_rational

g = LacunarySeries.from_ab(0.5, 13)
disc = make_unit_disc()
ladder = ScaleLadder(0.3, 1 / 13, 6, 256)
slope_min, M_crit = default_thresholds(g.params)
grid = grid_J(disc, 16)

for q in [RationalFunction.simple(2.0)] + [random_rational(disc, 3, 1.0, s) for s in range(3)]:
    rep = perturbation_invariance(g, q, disc, grid, ladder, slope_min, M_crit)
    print(f"{q.name:40.40s}  M_hat={rep.M_hat:7.3f}  invariant={rep.all_hold}  triangle={rep.triangle_ok}")

z = np.exp(2j * np.pi * np.arange(256) / 256)
ring = [2 * np.exp(2j * np.pi * k / 8) for k in range(8)]
print("degree  max error  residual")
for d in range(0, 9, 2):
    fit = fit_fixed_poles(z, g(z), ring, d, 3)
    print(f"{d:6d}  {fit.max_error:9.4f}  {fit.residual_norm:8.4f}")
print(fit.note)
