"""Moving the seed onto the half-plane with w -> exp(-w).

exp(-w) maps Re w > 0 into the disc and the imaginary axis onto the circle,
so h = g o exp(-w) has the same rough boundary.  The chain rule predicts how
distances rescale: for w -> w0 along J the ratio |w - w0| / |phi(w) - phi(w0)|
tends to 1 / |exp(-w0)|, and quotients of h pick up that factor.
"""
import numpy as np

from ndpos import LacunarySeries, ScaleLadder, certify_blowup, default_thresholds, grid_J
from ndpos.domains import half_plane_segment, make_right_half_plane
from ndpos.quotient import profile
from ndpos.transport import map_exp_negative, transport_function, verify_chain_rule

g = LacunarySeries.from_ab(0.5, 13)
hp = make_right_half_plane(4)
phi = map_exp_negative()

for w0 in (0j, 0.5j, 2j):
    rep = verify_chain_rule(g, phi, hp, hp.locate(w0))
    print(f"w0={w0}: observed ratio {rep.inverse_ratios[-1]:.6f}  predicted {rep.target:.6f}"
          f"  rel err {rep.relative_error:.1e}")

# On J_1 = [-i, i] the map shrinks lengths by at least deriv_floor, so the
# critical quotient level for the transported function is scaled down too.
J1 = half_plane_segment(hp, 1)
h = transport_function(g, phi, J1)
slope_min, M_crit = default_thresholds(g.params)
print(f"deriv_floor on J_1 = {h.deriv_floor:.4f}, rescaled M_crit = {M_crit * h.deriv_floor:.3f}")
ladder = ScaleLadder(0.3, 1 / 13, 6, 256)
dom = hp.with_J(J1)
for w0 in grid_J(dom, 8):
    c = certify_blowup(profile(h, dom, w0, ladder), slope_min, M_crit * h.deriv_floor)
    print(f"  w0={w0.point.imag:+.3f}i  slope={c.growth_slope:.2f}  certified={c.passed}")
