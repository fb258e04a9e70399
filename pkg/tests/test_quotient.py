import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndpos.domains import grid_J, make_slit_disc
from ndpos.perturb import RationalFunction
from ndpos.quotient import (
    DerivativeUnavailable,
    InsufficientScales,
    QuotientProfile,
    ScaleLadder,
    Underpowered,
    bounded_quotient_check,
    certify_blowup,
    default_ladder,
    default_thresholds,
    en_test,
    growth_slope,
    profile,
    profile_grid,
    window_quotients,
)

LADDER = ScaleLadder(0.3, 1 / 13, 6, 256)


class Affine:
    def __init__(self, c, d=0.0):
        self.c, self.d = c, d

    def __call__(self, z):
        return self.c * np.asarray(z) + self.d

    def derivative(self, z):
        return np.full(np.shape(z), self.c, dtype=complex)


def test_ladder_validation_and_parse():
    lad = ScaleLadder.parse("0.3,1/13,6,256")
    assert lad == LADDER == default_ladder(13)
    assert np.all(np.diff(lad.deltas) < 0)
    for bad in [(0, 0.5, 3), (1, 1.0, 3), (1, 0.5, 1), (1, 0.5, 3, 4)]:
        with pytest.raises(ValueError):
            ScaleLadder(*bad)


def test_identity_and_constant_profiles(disc):
    z0 = disc.sample(0, 0.1)
    p = profile(Affine(1.0), disc, z0, LADDER)
    assert np.allclose(p.M, 1.0, rtol=1e-12)
    c = profile(Affine(0.0, 3.0), disc, z0, LADDER)
    assert all(m == 0.0 for m in c.M)
    cert = certify_blowup(c, 0.5, 10)
    assert not cert.passed and math.isfinite(cert.growth_slope)
    assert not certify_blowup(p, 0.5, 10).passed
    assert abs(certify_blowup(p, 0.5, 10).growth_slope) < 1e-9


def test_weierstrass_grows_at_one(g, disc):
    p = profile(g, disc, disc.sample(0, 0.0), LADDER)
    assert p.M[-1] / p.M[0] >= 10
    cert = certify_blowup(p, *default_thresholds(g.params))
    assert cert.passed
    # the slope sits near the classical rate ln(ab)
    assert abs(cert.growth_slope - math.log(6.5)) < 0.3
    ns = [n for n, _ in cert.crossings]
    assert ns == sorted(ns) and ns[0] == 1


def test_profile_is_window_max(g, disc):
    z0 = disc.sample(0, 0.3)
    p = profile(g, disc, z0, LADDER)
    for k, delta in enumerate(p.deltas):
        _, q = window_quotients(g, disc, z0, delta, 256)
        assert p.M[k] == q.max()
        assert np.all(q >= 0) and np.all(np.isfinite(q))


@settings(max_examples=20, deadline=None)
@given(st.complex_numbers(max_magnitude=10), st.floats(0, 1))
def test_constant_shift_and_scaling(c, t):
    from ndpos.domains import make_unit_disc
    from ndpos.series import LacunarySeries
    disc = make_unit_disc()
    g = LacunarySeries.from_ab(0.5, 13)
    lad = ScaleLadder(0.3, 1 / 13, 4, 64)
    z0 = disc.sample(0, t)
    base = profile(g, disc, z0, lad)
    shifted = profile(lambda z: g(z) + 5.0, disc, z0, lad)
    # adding a constant changes the quotients by rounding only
    assert np.allclose(shifted.M, base.M, rtol=1e-7)
    if abs(c) > 1e-3:
        scaled = profile(lambda z: c * g(z), disc, z0, lad)
        assert np.allclose(scaled.as_array(), abs(c) * base.as_array(), rtol=1e-12)
        a = certify_blowup(base, 0.9, 10)
        b = certify_blowup(scaled, 0.9, 10 * abs(c))
        assert a.passed == b.passed


def test_insufficient_scales(disc):
    p = profile(Affine(1.0), disc, disc.sample(0, 0), ScaleLadder(0.1, 0.5, 2, 16))
    with pytest.raises(InsufficientScales):
        certify_blowup(p, 0.5, 10)


def test_noise_floor_rejects_underpowered(g, disc):
    lad = ScaleLadder(1e-3, 1e-3, 3, 16)  # finest 1e-9
    p = profile(g, disc, disc.sample(0, 0.2), lad)
    # 1e-9 * 5e-3 = 5e-12 is below 10 * tolerance = 1e-11
    with pytest.raises(Underpowered):
        certify_blowup(p, 0.5, 5e-3)
    certify_blowup(p, 0.5, 0.1)


def test_growth_slope_guard():
    p = QuotientProfile(None, LADDER, tuple(LADDER.deltas), (0.0,) * 6, (None,) * 6, (1,) * 6)
    assert growth_slope(p) == pytest.approx(0.0, abs=1e-9)


def test_en_test_semantics(g, disc):
    assert en_test(Affine(10.0), disc, 2, 16).all_found
    assert en_test(Affine(1.0), disc, 2, 16).none_found
    rep = en_test(g, disc, 20, 16)
    assert rep.all_found
    for w in rep.witnesses:
        assert w.quotient > 20 and 0 < abs(w.witness.point - w.z0.point) < 1 / 20


def test_en_test_rational_absent(disc):
    q = RationalFunction.simple(2.0)
    # sup |q'| on the circle is 1
    assert en_test(q, disc, 2, 32).none_found


def test_plateau_examples(disc):
    q = RationalFunction.simple(2.0)
    rep = bounded_quotient_check(q, disc, disc.sample(0, 0.0), LADDER)
    assert rep.passed and rep.derivative_modulus == pytest.approx(1.0)
    sq = RationalFunction(polynomial=(0, 0, 1))
    rep = bounded_quotient_check(sq, disc, disc.locate(1j), LADDER)
    assert rep.passed and rep.derivative_modulus == pytest.approx(2.0)
    with pytest.raises(DerivativeUnavailable):
        bounded_quotient_check(lambda z: z, disc, disc.sample(0, 0), LADDER)


def test_slit_disc_plateau(g):
    d = make_slit_disc((0.1, 0.4))
    for z0 in grid_J(d, 8):
        rep = bounded_quotient_check(g, d, z0, LADDER)
        assert rep.passed
        assert rep.derivative_modulus == pytest.approx(abs(g.eval_interior_derivative(z0.point)))


def test_profile_grid_order_and_determinism(g, disc):
    grid = grid_J(disc, 8)
    a = profile_grid(g, disc, grid, LADDER, workers=1)
    b = profile_grid(g, disc, grid, LADDER, workers=3)
    assert [p.M for p in a] == [p.M for p in b]
    assert [p.z0 for p in a] == grid
