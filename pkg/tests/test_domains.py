import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ndpos.domains import (
    DiscPart,
    EmptyIntersection,
    HalfPlanePart,
    NotConvex,
    NotOnBoundary,
    TooFewVertices,
    UnknownDomain,
    closure_samples,
    domain_from_id,
    grid_J,
    half_plane_segment,
    make_convex_polygon,
    make_half_plane_minus_ray,
    make_intersection,
    make_right_half_plane,
    make_sector,
    make_slit_disc,
    make_square_minus_disc,
    make_unit_disc,
    pole_distances,
    sample_J_near,
    seminorm,
)

CATALOG_IDS = ["disc", "half-plane", "sector", "polygon:0,1,1+1j,1j", "square-minus-disc",
               "slit-disc", "half-plane-minus-ray", "intersection:disc(0,1);half(0,1)"]


def member(d, z):
    return bool(d.membership(np.array([complex(z)]))[0])


def test_unit_disc(disc):
    assert member(disc, 0.5) and not member(disc, 1.0)
    assert disc.boundary_J.pieces[0].point(0.0) == 1 + 0j
    assert len(disc.pole_sites) >= 9
    assert disc.bounded and not disc.negative_control


def test_right_half_plane():
    d = make_right_half_plane(4)
    assert member(d, 1 + 5j) and not member(d, -0.1)
    J2 = half_plane_segment(d, 2).pieces[0]
    assert (J2.point(0.0), J2.point(1.0)) == (-2j, 2j)
    assert not d.in_closure(np.array([-1 + 0j]))[0]
    assert d.exhaustion_radii == (1.0, 2.0, 3.0, 4.0)
    assert not d.bounded


def test_sector():
    d = make_sector()
    A, B, C = d.boundary_J.pieces
    assert (A.tag, B.tag, C.tag) == ("A", "B", "C")
    assert abs(A.point(1.0) - np.exp(3j * np.pi / 4)) < 1e-15
    assert abs(B.point(0.5) - 1j) < 1e-15
    assert member(d, 0.5j)
    assert not member(d, 0.5)


def test_convex_polygon():
    sq = make_convex_polygon([1 - 1j, 1 + 1j, -1 + 1j, -1 - 1j])
    assert len(sq.boundary_J.pieces) == 4
    tri = make_convex_polygon([0, 1, 1j])
    edge = tri.boundary_J.pieces[1]
    assert edge.point(0.5) == 0.5 + 0.5j
    assert tri.locate(0.5 + 0.5j).piece_index == 1
    with pytest.raises(NotConvex):
        make_convex_polygon([0, 1, 1 + 1j, 0.5 + 0.5j, 1j])
    with pytest.raises(NotConvex):
        make_convex_polygon([0, 1j, 1])  # clockwise
    with pytest.raises(TooFewVertices):
        make_convex_polygon([0, 1])


def test_square_minus_disc():
    d = make_square_minus_disc()
    assert member(d, 1.05 * np.exp(1j * np.pi / 4))
    assert not member(d, 0.5)
    assert 0j in d.pole_sites
    assert not d.in_closure(np.array([0j]))[0]
    assert len(d.boundary_J.pieces) == 5
    assert any("four" in n for n in d.notes)
    with pytest.raises(ValueError):
        make_square_minus_disc(0.8)


def test_intersection_quadrant_and_half_disc():
    q = make_intersection([HalfPlanePart(0j, 1 + 0j), HalfPlanePart(0j, 1j)], r_max=4)
    assert member(q, 1 + 1j) and not member(q, -1 + 1j)
    # both axes carry J pieces
    mids = [p.point(0.5) for p in q.boundary_J.pieces]
    assert any(abs(m.real) < 1e-12 for m in mids) and any(abs(m.imag) < 1e-12 for m in mids)
    with pytest.raises(EmptyIntersection):
        make_intersection([DiscPart(0j, 1.0), DiscPart(3 + 0j, 1.0)])
    hd = make_intersection([DiscPart(0j, 1.0), HalfPlanePart(0j, 1 + 0j)])
    arcs = [p for p in hd.boundary_J.pieces if hasattr(p, "radius")]
    assert len(arcs) == 1
    a0 = np.angle(arcs[0].point(0.0))
    a1 = np.angle(arcs[0].point(1.0))
    assert sorted([a0, a1]) == pytest.approx([-np.pi / 2, np.pi / 2], abs=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.2, 3))
def test_single_part_intersection_matches_part(cx, cy, r):
    part = DiscPart(complex(cx, cy), r)
    d = make_intersection([part], resolution=512)
    rng = np.random.default_rng(0)
    z = rng.uniform(-6, 6, 10_000) + 1j * rng.uniform(-6, 6, 10_000)
    assert np.array_equal(d.membership(z), part.inside(z))


def test_negative_controls():
    s = make_slit_disc()
    assert s.negative_control
    assert not member(s, 0.25) and member(s, 0.25 + 0.1j)
    r = make_half_plane_minus_ray()
    assert r.negative_control
    assert not member(r, 2.0) and member(r, 2 + 0.1j)
    assert r.boundary_J.pieces[0].point(1.0) == 16.0
    # every interior slit point has domain points on both sides
    for d in (s, make_half_plane_minus_ray((1.5, 3.0))):
        for z0 in grid_J(d, 7):
            for eps in (1e-3, 1e-6):
                assert member(d, z0.point + 1j * eps) and member(d, z0.point - 1j * eps)


@pytest.mark.parametrize("spec", CATALOG_IDS)
def test_pole_sites_off_closure(spec):
    d = domain_from_id(spec)
    assert len(d.pole_sites) >= 1
    assert np.min(pole_distances(d)) >= d.pole_margin


@pytest.mark.parametrize("spec", CATALOG_IDS)
def test_J_lies_on_boundary(spec):
    d = domain_from_id(spec)
    for s in grid_J(d, 24):
        assert s.point == d.boundary_J.pieces[s.piece_index].point(s.parameter)
        assert d.in_closure(np.array([s.point]))[0]
        # boundary within geometric tolerance: points in and out of the domain nearby
        ring = s.point + 1e-6 * np.exp(2j * np.pi * np.arange(16) / 16)
        inside = d.membership(ring)
        assert not inside.all()
        if spec == "square-minus-disc" and min(abs(s.point - c) for c in (1, 1j, -1, -1j)) < 1e-12:
            # tangency point of square and circle: the domain is a cusp there
            assert member(d, s.point * complex(1 - 1e-7, 1e-3))
            continue
        assert inside.any()


def test_unknown_domain():
    with pytest.raises(UnknownDomain):
        domain_from_id("annulus")


def test_sample_near_disc(disc):
    z0 = disc.sample(0, 0.0)
    pts = sample_J_near(disc, z0, 0.1, 8)
    assert len(pts) == 8
    theta = np.array([np.angle(s.point) for s in pts])
    assert np.all(np.abs(theta) > 0)
    assert np.max(np.abs(theta)) <= 2 * math.asin(0.05) + 1e-12
    assert np.max(np.abs(theta)) == pytest.approx(0.10004, abs=1e-4)
    assert all(s.point != 1 for s in pts)


def test_sample_near_endpoint_is_one_sided():
    d = make_slit_disc()
    pts = sample_J_near(d, d.sample(0, 0.0), 0.01, 10)
    x = np.array([s.point for s in pts])
    assert np.all(x.real > 0) and np.all(x.real <= 0.01) and np.all(x.imag == 0)


def test_sample_below_floor_is_empty(disc):
    assert sample_J_near(disc, disc.sample(0, 0.3), 1e-14, 8) == []


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CATALOG_IDS[:-1]), st.floats(0, 1), st.floats(1e-6, 0.8),
       st.integers(1, 64))
def test_sample_window_invariant(spec, t, delta, count):
    d = domain_from_id(spec)
    z0 = d.sample(0, t if d.boundary_J.pieces[0].closed else min(t, 1.0))
    pts = sample_J_near(d, z0, delta, count)
    assert len(pts) <= count
    for s in pts:
        assert s.point == d.boundary_J.pieces[s.piece_index].point(s.parameter)
        dist = abs(s.point - z0.point)
        assert 0 < dist <= delta * (1 + 1e-12)


def test_locate_errors(disc):
    assert disc.locate(1j).parameter == pytest.approx(0.25)
    with pytest.raises(NotOnBoundary):
        disc.locate(0.5)


def test_seminorms():
    hp = make_right_half_plane(4)
    assert seminorm(hp, lambda z: z, 2) == pytest.approx(2.0, abs=1e-9)
    assert seminorm(hp, lambda z: np.full(np.shape(z), 3 - 4j), 3) == 5.0
    # maximum at z = 0; the grid resolves it to about 1e-5
    assert seminorm(hp, lambda z: 1 / (z + 1), 1) == pytest.approx(1.0, abs=1e-4)


def test_closure_samples_inside(disc):
    z = closure_samples(disc, 2000)
    assert np.all(np.abs(z) <= 1 + 1e-9)
