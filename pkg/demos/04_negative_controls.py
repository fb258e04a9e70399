"""Where the method must say no.

On the slit disc the chosen J is the slit [0.1, 0.4], which lies inside the
disc of convergence, so g is analytic there and quotients level off at |g'|.
The half-plane minus a ray has the same behaviour on its ray.  A working
certificate has to fail on both.
"""
import numpy as np

from ndpos import LacunarySeries, ScaleLadder, bounded_quotient_check, certify_blowup, default_thresholds, grid_J
from ndpos.domains import make_half_plane_minus_ray, make_slit_disc
from ndpos.quotient import profile
from ndpos.transport import map_exp_negative, transport_function

g = LacunarySeries.from_ab(0.5, 13)
ladder = ScaleLadder(0.3, 1 / 13, 6, 256)
slope_min, M_crit = default_thresholds(g.params)

slit = make_slit_disc((0.1, 0.4))
ray = make_half_plane_minus_ray((1.5, 3.0))
h = transport_function(g, map_exp_negative(), ray.boundary_J)
for name, dom, f in (("slit disc", slit, g), ("half-plane minus ray", ray, h)):
    print(name)
    for z0 in grid_J(dom, 4):
        rep = bounded_quotient_check(f, dom, z0, ladder)
        cert = certify_blowup(profile(f, dom, z0, ladder), slope_min, M_crit)
        print(f"  z0={z0.point:.3f}  plateau {rep.M[-1]:.5f} vs |f'| {rep.derivative_modulus:.5f}"
              f"  certified={cert.passed}")
