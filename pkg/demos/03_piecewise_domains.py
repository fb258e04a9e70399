"""Sector and pentagon: one transport chain per boundary piece.

A Jordan domain with corners has no single map to the disc in closed form,
but each smooth piece of J has a local chain onto the unit circle.  We pull
the seed back along each chain and certify blowup piece by piece.
"""
import numpy as np

from ndpos import LacunarySeries, ScaleLadder, certify_blowup, default_thresholds, grid_J, piece_chain
from ndpos.domains import make_convex_polygon, make_sector
from ndpos.quotient import profile
from ndpos.transport import transport_function

g = LacunarySeries.from_ab(0.5, 13)
ladder = ScaleLadder(0.05, 1 / 13, 5, 256)
slope_min, M_crit = default_thresholds(g.params)

pentagon = make_convex_polygon([np.exp(2j * np.pi * k / 5) for k in range(5)])
for name, dom in (("sector", make_sector()), ("pentagon", pentagon)):
    print(name)
    for i, piece in enumerate(dom.boundary_J.pieces):
        sub = dom.with_J(type(dom.boundary_J)((piece,)))
        f = transport_function(g, piece_chain(dom, i), sub.boundary_J)
        certs = [certify_blowup(profile(f, sub, z0, ladder), slope_min, M_crit * f.deriv_floor)
                 for z0 in grid_J(sub, 4)]
        print(f"  piece {i} ({type(piece).__name__}): {sum(c.passed for c in certs)}/4 certified,"
              f" min slope {min(c.growth_slope for c in certs):.2f}")
