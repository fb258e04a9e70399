"""Freeze the package's own profiles for weierstrass(0.5, 13) on the 16-point
circle grid with ladder (0.3, 1/13, 6, 256), for exact-reproduction checks.

The brute-force reference in ``disc_oracle.json`` validates these numbers;
this file pins them bit for bit.

    python tests/oracles/freeze_golden_profiles.py
"""

from pathlib import Path

from ndpos.cli import PROFILE_COLUMNS, profile_rows
from ndpos.domains import grid_J, make_unit_disc
from ndpos.quotient import ScaleLadder, profile
from ndpos.series import LacunarySeries


def golden_text() -> str:
    g = LacunarySeries.from_ab(0.5, 13)
    disc = make_unit_disc()
    ladder = ScaleLadder(0.3, 1 / 13, 6, 256)
    profs = [(z0.piece_index, profile(g, disc, z0, ladder)) for z0 in grid_J(disc, 16)]
    lines = [",".join(PROFILE_COLUMNS)] + [",".join(r) for _, r in profile_rows(profs)]
    return "\n".join(lines) + "\n"


if __name__ == "__main__":
    path = Path(__file__).resolve().parents[1] / "data" / "disc_profile_golden.csv"
    path.write_text(golden_text())
