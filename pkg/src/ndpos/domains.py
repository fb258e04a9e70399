"""Catalog of planar domains with boundary target sets, samplers and pole sites.

A domain is described by an open membership predicate, a closure predicate,
its (truncated) topological boundary ``outline`` and the target set ``J``
on which difference quotients are studied.  Both boundary sets are finite
unions of parametrized segments and circular arcs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NdposError

GEOM_TOL = 1e-9
POLE_MARGIN = 0.25
R_MAX = 16.0
#: windows narrower than this (relative to 1 + |z0|) are not sampled
SAMPLER_FLOOR = 1e-12
TWO_PI = 2.0 * math.pi


class DomainError(NdposError):
    tag = "DomainError"


class NotConvex(DomainError):
    tag = "NotConvex"


class TooFewVertices(DomainError):
    tag = "TooFewVertices"


class EmptyIntersection(DomainError):
    tag = "EmptyIntersection"


class NotOnBoundary(DomainError):
    tag = "NotOnBoundary"


class UnknownDomain(DomainError):
    tag = "UnknownDomain"


# ---------------------------------------------------------------- pieces


@dataclass(frozen=True)
class Segment:
    """Straight piece ``t -> start + t*(end - start)`` for ``t`` in [0, 1]."""

    start: complex
    end: complex
    tag: str = ""

    closed = False
    kind = "segment"

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.start + t * (self.end - self.start)

    def tangent(self, t):
        return np.broadcast_to(self.end - self.start, np.shape(t)).astype(complex)

    def window(self, z0: complex, delta: float) -> list[tuple[float, float]]:
        # solve |start + t v - z0|^2 <= delta^2 for t
        v = self.end - self.start
        w = self.start - z0
        A = abs(v) ** 2
        B = (v.conjugate() * w).real
        C = abs(w) ** 2 - delta * delta
        disc = B * B - A * C
        if disc < 0:
            return []
        root = math.sqrt(disc)
        # numerically stable pair of roots
        q = -(B + math.copysign(root, B)) if B != 0 else root
        r1 = q / A if q != 0 else 0.0
        r2 = C / q if q != 0 else -r1
        lo, hi = max(0.0, min(r1, r2)), min(1.0, max(r1, r2))
        return [(lo, hi)] if lo <= hi else []

    def locate(self, z: complex) -> tuple[float, float]:
        v = self.end - self.start
        t = ((z - self.start) * v.conjugate()).real / abs(v) ** 2
        t = min(1.0, max(0.0, t))
        return t, abs(complex(self.point(t)) - z)

    def describe(self) -> str:
        return f"segment[{_fmt(self.start)}, {_fmt(self.end)}]"


@dataclass(frozen=True)
class Arc:
    """Circular piece ``t -> center + radius*exp(i*(theta0 + t*span))``, ``span > 0``."""

    center: complex
    radius: float
    theta0: float
    span: float
    tag: str = ""

    kind = "arc"

    @property
    def closed(self) -> bool:
        return abs(self.span - TWO_PI) < 1e-15

    @property
    def length(self) -> float:
        return self.radius * self.span

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + self.radius * np.exp(1j * (self.theta0 + t * self.span))

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        return 1j * self.span * self.radius * np.exp(1j * (self.theta0 + t * self.span))

    def window(self, z0: complex, delta: float) -> list[tuple[float, float]]:
        w = z0 - self.center
        d = abs(w)
        r = self.radius
        gap = r - d
        if delta * delta < gap * gap or delta <= 0:
            return []
        if d == 0.0:
            half = math.pi
        else:
            # half-angle form of the law of cosines; stable for small delta
            s = (delta - gap) * (delta + gap) / (4.0 * r * d)
            half = math.pi if s >= 1.0 else 2.0 * math.asin(math.sqrt(s))
        psi = math.atan2(w.imag, w.real) if d > 0 else 0.0
        half = min(half, math.pi)
        u = (psi - self.theta0) % TWO_PI
        if self.closed:
            # unwrapped interval around the centre parameter; callers reduce mod 1
            if u > math.pi:
                u -= TWO_PI
            return [((u - half) / self.span, (u + half) / self.span)]
        out = []
        for shift in (-TWO_PI, 0.0, TWO_PI):
            lo = max(0.0, u + shift - half)
            hi = min(self.span, u + shift + half)
            if lo <= hi:
                out.append((lo / self.span, hi / self.span))
        return out

    def locate(self, z: complex) -> tuple[float, float]:
        w = z - self.center
        ang = math.atan2(w.imag, w.real)
        u = (ang - self.theta0) % TWO_PI
        if u > self.span:
            # nearest endpoint
            t = 0.0 if (TWO_PI - u) < (u - self.span) else 1.0
        else:
            t = u / self.span
        if self.closed and t >= 1.0:
            t = 0.0
        return t, abs(complex(self.point(t)) - z)

    def describe(self) -> str:
        return (f"arc[c={_fmt(self.center)}, r={self.radius:g}, "
                f"theta={self.theta0:.6g}..{self.theta0 + self.span:.6g}]")


def _fmt(z: complex) -> str:
    z = complex(z)
    return f"{z.real:g}{z.imag:+g}i"


Piece = Segment | Arc


@dataclass(frozen=True)
class BoundarySet:
    pieces: tuple
    compact: bool = True

    def __post_init__(self):
        for p in self.pieces:
            if not p.length > 0:
                raise DomainError(f"boundary piece {p.describe()} has zero length")

    def __len__(self):
        return len(self.pieces)

    @property
    def length(self) -> float:
        return sum(p.length for p in self.pieces)


@dataclass(frozen=True)
class JSample:
    point: complex
    piece_index: int
    parameter: float


# ---------------------------------------------------------------- domain spec


@dataclass(frozen=True)
class DomainSpec:
    """Immutable catalog entry.

    ``membership`` and ``in_closure`` are vectorized predicates on complex
    arrays.  ``outline`` is the full boundary (truncated to ``r_max`` for
    unbounded domains); ``boundary_J`` the target set for quotient analysis.
    """

    id: str
    title: str
    description: str
    membership: Callable
    in_closure: Callable
    boundary_J: BoundarySet
    outline: BoundarySet
    pole_sites: tuple
    bounded: bool
    bbox: tuple
    exhaustion_radii: tuple = ()
    negative_control: bool = False
    r_max: float = R_MAX
    pole_margin: float = POLE_MARGIN
    notes: tuple = ()
    params: dict = field(default_factory=dict)

    def with_J(self, J: BoundarySet, note: str | None = None) -> "DomainSpec":
        notes = self.notes + ((note,) if note else ())
        return DomainSpec(**{**self.__dict__, "boundary_J": J, "notes": notes})

    def sample(self, piece_index: int, t: float) -> JSample:
        piece = self.boundary_J.pieces[piece_index]
        return JSample(complex(piece.point(t)), piece_index, float(t))

    def locate(self, z: complex, tol: float = GEOM_TOL) -> JSample:
        """JSample of the point of J nearest to ``z`` (must be within ``tol``)."""
        best = None
        for i, piece in enumerate(self.boundary_J.pieces):
            t, dist = piece.locate(complex(z))
            if best is None or dist < best[2]:
                best = (i, t, dist)
        if best is None or best[2] > tol:
            raise NotOnBoundary(f"{_fmt(z)} is not on J of {self.id}")
        return self.sample(best[0], best[1])


def _disc_closure_dist(points, center, radius):
    return np.abs(np.asarray(points) - center) - radius


def outline_samples(outline: BoundarySet, count: int = 4000) -> np.ndarray:
    total = outline.length
    pts = []
    for p in outline.pieces:
        m = max(8, int(round(count * p.length / total)))
        pts.append(p.point(np.linspace(0.0, 1.0, m)))
    return np.concatenate(pts)


def closure_samples(domain: DomainSpec, count: int = 10_000, radius: float | None = None) -> np.ndarray:
    """Deterministic points of the closure: a filtered grid plus outline points."""
    xmin, xmax, ymin, ymax = domain.bbox
    if radius is not None:
        xmin, xmax = max(xmin, -radius), min(xmax, radius)
        ymin, ymax = max(ymin, -radius), min(ymax, radius)
    side = max(2, int(math.sqrt(count / 2)))
    X, Y = np.meshgrid(np.linspace(xmin, xmax, side), np.linspace(ymin, ymax, side))
    grid = (X + 1j * Y).ravel()
    grid = grid[domain.in_closure(grid)]
    edge = outline_samples(domain.outline, max(count - grid.size, count // 2))
    pts = np.concatenate([grid, edge])
    if radius is not None:
        pts = pts[np.abs(pts) <= radius * (1 + 1e-12)]
    return pts


def pole_distances(domain: DomainSpec, count: int = 10_000) -> np.ndarray:
    pts = closure_samples(domain, count)
    return np.array([np.min(np.abs(pts - p)) for p in domain.pole_sites])


def _keep_far_poles(candidates, membership_closure, outline, bbox, margin):
    probe = outline_samples(outline, 8000)
    xmin, xmax, ymin, ymax = bbox
    X, Y = np.meshgrid(np.linspace(xmin, xmax, 120), np.linspace(ymin, ymax, 120))
    grid = (X + 1j * Y).ravel()
    probe = np.concatenate([probe, grid[membership_closure(grid)]])
    kept = []
    for p in candidates:
        p = complex(p)
        if np.min(np.abs(probe - p)) >= margin and not membership_closure(np.array([p]))[0]:
            if all(abs(p - q) > 1e-9 for q in kept):
                kept.append(p)
    return tuple(kept)


# ---------------------------------------------------------------- catalog


def make_unit_disc() -> DomainSpec:
    circle = Arc(0j, 1.0, 0.0, TWO_PI, tag="T")
    J = BoundarySet((circle,))
    ring = tuple(2.0 * np.exp(1j * TWO_PI * k / 8) for k in range(8))
    return DomainSpec(
        id="disc",
        title="open unit disc, J = unit circle",
        description="unit disc, J the circle",
        membership=lambda z: np.abs(z) < 1.0,
        in_closure=lambda z: np.abs(z) <= 1.0 + GEOM_TOL,
        boundary_J=J,
        outline=J,
        pole_sites=tuple(complex(p) for p in ring) + (complex(R_MAX),),
        bounded=True,
        bbox=(-1.0, 1.0, -1.0, 1.0),
    )


def _right_half_plane_poles(n_max: int) -> tuple:
    sites = [complex(-1.0, float(k)) for k in range(-n_max, n_max + 1)]
    return tuple(sites) + (-2.0 + 0j, -4.0 + 0j)


def make_right_half_plane(n_max: int = 4, r_max: float = R_MAX) -> DomainSpec:
    """Right half-plane with ``J = J_{n_max} = [-i n_max, i n_max]``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > r_max:
        raise ValueError("n_max must not exceed r_max")
    J = BoundarySet((Segment(complex(0, -n_max), complex(0, n_max), tag=f"J_{n_max}"),))
    outline = BoundarySet((Segment(complex(0, -r_max), complex(0, r_max), tag="iR"),))
    return DomainSpec(
        id="half-plane",
        title="right half-plane Re z > 0, J = [-i n, i n]",
        description="right half-plane, J_n = [-in, in]",
        membership=lambda z: np.real(z) > 0.0,
        in_closure=lambda z: np.real(z) >= -GEOM_TOL,
        boundary_J=J,
        outline=outline,
        pole_sites=_right_half_plane_poles(n_max),
        bounded=False,
        bbox=(0.0, r_max, -r_max, r_max),
        exhaustion_radii=tuple(float(k) for k in range(1, n_max + 1)),
        r_max=r_max,
        notes=(f"unbounded: J truncated to J_{n_max}, closure truncated at R_max = {r_max:g}",),
        params={"n_max": n_max, "r_max": r_max},
    )


def half_plane_segment(domain: DomainSpec, n: int) -> BoundarySet:
    """Sub-segment ``J_n = [-i n, i n]`` of the half-plane target set."""
    if domain.id != "half-plane":
        raise DomainError("J_n is only defined for the half-plane")
    n_max = domain.params["n_max"]
    if not 1 <= n <= n_max:
        raise ValueError(f"n must lie in 1..{n_max}")
    return BoundarySet((Segment(complex(0, -n), complex(0, n), tag=f"J_{n}"),))


def make_sector() -> DomainSpec:
    """Jordan domain bounded by the radii at angles 3pi/4, pi/4 and the arc between them."""
    lo, hi = math.pi / 4, 3 * math.pi / 4
    A = Segment(0j, complex(np.exp(1j * hi)), tag="A")
    B = Arc(0j, 1.0, lo, hi - lo, tag="B")
    C = Segment(0j, complex(np.exp(1j * lo)), tag="C")
    J = BoundarySet((A, B, C))

    def membership(z):
        z = np.asarray(z)
        ang = np.angle(z)
        return (np.abs(z) < 1.0) & (ang > lo) & (ang < hi)

    def in_closure(z):
        z = np.asarray(z)
        ang = np.angle(z)
        small = np.abs(z) <= GEOM_TOL
        r = np.abs(z)
        # angular slack scaled to a geometric tolerance in distance
        slack = GEOM_TOL / np.maximum(r, GEOM_TOL)
        return small | ((r <= 1.0 + GEOM_TOL) & (ang >= lo - slack) & (ang <= hi + slack))

    candidates = [0.5, -0.5, -0.5j, 1.5j, 1.5 * np.exp(1j * lo), 1.5 * np.exp(1j * hi),
                  -1.0 + 0.5j, 1.0 + 0.5j, 2.0j]
    bbox = (-1.0, 1.0, 0.0, 1.0)
    poles = _keep_far_poles(candidates, in_closure, J, bbox, POLE_MARGIN)
    return DomainSpec(
        id="sector",
        title="sector bounded by A, B, C (angles pi/4 .. 3pi/4, radius 1)",
        description="sector pi/4..3pi/4, J = two radii and the arc",
        membership=membership,
        in_closure=in_closure,
        boundary_J=J,
        outline=J,
        pole_sites=poles,
        bounded=True,
        bbox=bbox,
    )


def _polygon_edges(vertices):
    n = len(vertices)
    return [(vertices[i], vertices[(i + 1) % n]) for i in range(n)]


def _cross(u: complex, v: complex) -> float:
    return (u.conjugate() * v).imag


def make_convex_polygon(vertices: Sequence[complex]) -> DomainSpec:
    """Interior of a convex polygon given counterclockwise."""
    verts = [complex(v) for v in vertices]
    if len(verts) < 3:
        raise TooFewVertices(f"need >= 3 vertices, got {len(verts)}")
    edges = _polygon_edges(verts)
    n = len(verts)
    turning = 0.0
    for i in range(n):
        u = edges[i][1] - edges[i][0]
        v = edges[(i + 1) % n][1] - edges[(i + 1) % n][0]
        if abs(u) == 0 or abs(v) == 0:
            raise NotConvex("repeated vertex")
        if _cross(u, v) <= GEOM_TOL * abs(u) * abs(v):
            raise NotConvex(f"vertex {_fmt(verts[(i + 1) % n])} is not a strict left turn")
        turning += math.atan2(_cross(u, v), (u.conjugate() * v).real)
    if abs(turning - TWO_PI) > 1e-6:
        raise NotConvex("vertices wind more than once")

    def signed(z):
        z = np.asarray(z, dtype=complex)
        # min over edges of the signed distance to the edge line (positive inside)
        out = np.full(z.shape, np.inf)
        for a, b in edges:
            d = (b - a) / abs(b - a)
            out = np.minimum(out, np.imag(np.conj(d) * (z - a)))
        return out

    pieces = tuple(Segment(a, b, tag=f"[a{i},a{(i + 1) % n}]") for i, (a, b) in enumerate(edges))
    J = BoundarySet(pieces)
    xs = [v.real for v in verts]
    ys = [v.imag for v in verts]
    bbox = (min(xs), max(xs), min(ys), max(ys))
    centroid = sum(verts) / n
    candidates = []
    for a, b in edges:
        d = (b - a) / abs(b - a)
        candidates.append((a + b) / 2 - 1j * d * 0.5)
    for v in verts:
        candidates.append(v + (v - centroid) / abs(v - centroid) * 0.5)
    in_closure = lambda z: signed(z) >= -GEOM_TOL
    poles = _keep_far_poles(candidates, in_closure, J, bbox, POLE_MARGIN)
    return DomainSpec(
        id="polygon:" + ",".join(_complex_literal(v) for v in verts),
        title=f"convex polygon with {n} vertices",
        description="convex polygon, J the edges",
        membership=lambda z: signed(z) > 0.0,
        in_closure=in_closure,
        boundary_J=J,
        outline=J,
        pole_sites=poles,
        bounded=True,
        bbox=bbox,
        params={"vertices": verts},
    )


def _complex_literal(z: complex) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}j"


def make_square_minus_disc(half_side: float = 1.0) -> DomainSpec:
    """Open square of the given half-side minus the closed unit disc.

    With ``half_side = 1`` the square is tangent to the unit circle at the
    four edge midpoints, so the open set splits into four corner pieces.
    """
    h = float(half_side)
    if h < 1.0:
        raise ValueError("half_side must be >= 1 so that the unit circle lies in the closed square")
    corners = [complex(h, -h), complex(h, h), complex(-h, h), complex(-h, -h)]
    sides = tuple(Segment(a, b, tag=f"[a{i},a{(i + 1) % 4}]")
                  for i, (a, b) in enumerate(_polygon_edges(corners)))
    circle = Arc(0j, 1.0, 0.0, TWO_PI, tag="T")
    J = BoundarySet((circle,) + sides)

    def membership(z):
        z = np.asarray(z)
        return (np.abs(z.real) < h) & (np.abs(z.imag) < h) & (np.abs(z) > 1.0)

    def in_closure(z):
        z = np.asarray(z)
        t = GEOM_TOL
        return (np.abs(z.real) <= h + t) & (np.abs(z.imag) <= h + t) & (np.abs(z) >= 1.0 - t)

    d = h + 0.5
    candidates = [0j, d, -d, 1j * d, -1j * d, complex(d, d), complex(-d, d),
                  complex(-d, -d), complex(d, -d)]
    poles = tuple(complex(p) for p in candidates)
    notes = ()
    if h == 1.0:
        notes = ("half-side 1: the square touches the unit circle at the edge midpoints, "
                 "so the open set has four connected components",)
    return DomainSpec(
        id="square-minus-disc",
        title=f"square |x|,|y| < {h:g} minus closed unit disc",
        description="square minus the open disc",
        membership=membership,
        in_closure=in_closure,
        boundary_J=J,
        outline=J,
        pole_sites=poles,
        bounded=True,
        bbox=(-h, h, -h, h),
        notes=notes,
        params={"half_side": h},
    )


# ----- intersections of discs and half-planes


@dataclass(frozen=True)
class DiscPart:
    center: complex
    radius: float

    def inside(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def closure(self, z, tol=GEOM_TOL):
        return np.abs(np.asarray(z) - self.center) <= self.radius + tol

    def curve(self, r_max: float):
        return Arc(self.center, self.radius, 0.0, TWO_PI)


@dataclass(frozen=True)
class HalfPlanePart:
    """``{z : Re((z - point) * conj(normal)) > 0}``; ``normal`` points inside."""

    point: complex
    normal: complex

    def __post_init__(self):
        if self.normal == 0:
            raise DomainError("half-plane normal must be nonzero")
        object.__setattr__(self, "normal", complex(self.normal) / abs(self.normal))

    def inside(self, z):
        return np.real((np.asarray(z) - self.point) * np.conj(self.normal)) > 0

    def closure(self, z, tol=GEOM_TOL):
        return np.real((np.asarray(z) - self.point) * np.conj(self.normal)) >= -tol

    def curve(self, r_max: float):
        # boundary line, direction keeps the inside on the left, clipped to |z| <= r_max
        d = -1j * self.normal
        foot = self.point - ((self.point * np.conj(d)).real) * d
        foot = complex(foot)
        off = abs(foot)
        if off >= r_max:
            return None
        half = math.sqrt(r_max * r_max - off * off)
        return Segment(foot - half * d, foot + half * d)


def _runs(mask: np.ndarray, closed: bool):
    """Maximal runs of True cells as (first, last) index pairs; wraps if closed."""
    n = mask.size
    if not mask.any():
        return []
    if mask.all():
        return [(0, n - 1, True)]
    runs = []
    i = 0
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            runs.append([i, j])
            i = j + 1
        else:
            i += 1
    if closed and len(runs) > 1 and runs[0][0] == 0 and runs[-1][1] == n - 1:
        first = runs.pop(0)
        runs[-1][1] = first[1] + n
    return [(a, b, False) for a, b in runs]


def _refine(curve, others, t_in, t_out, iters=60):
    # bisection on the predicate "point of curve lies on the closure of all other parts"
    def ok(t):
        z = np.array([complex(curve.point(t % 1.0 if curve.closed else t))])
        return all(o.closure(z, tol=0.0)[0] for o in others)

    for _ in range(iters):
        mid = 0.5 * (t_in + t_out)
        if ok(mid):
            t_in = mid
        else:
            t_out = mid
    return t_in


def make_intersection(parts: Sequence, r_max: float = R_MAX, resolution: int = 4096) -> DomainSpec:
    """Intersection of open discs and open half-planes.

    J consists of the sub-arcs and sub-segments of each part's boundary that
    lie on the closure of every other part, found by midpoint tests on a
    parameter grid of ``resolution`` cells and refined by bisection.  Corner
    points belong to both adjacent pieces.
    """
    parts = tuple(parts)
    if not parts:
        raise DomainError("need at least one part")

    def membership(z):
        z = np.asarray(z)
        out = np.ones(z.shape, dtype=bool)
        for p in parts:
            out &= p.inside(z)
        return out

    def in_closure(z):
        z = np.asarray(z)
        out = np.ones(z.shape, dtype=bool)
        for p in parts:
            out &= p.closure(z)
        return out

    # witness search on a grid covering all discs and the r_max box
    ext = r_max
    for p in parts:
        if isinstance(p, DiscPart):
            ext = max(ext, abs(p.center) + p.radius)
    side = 801
    X, Y = np.meshgrid(np.linspace(-ext, ext, side), np.linspace(-ext, ext, side))
    grid = (X + 1j * Y).ravel()
    inside = membership(grid)
    if not inside.any():
        raise EmptyIntersection("no interior point found at the configured resolution")

    pieces = []
    for idx, part in enumerate(parts):
        curve = part.curve(r_max)
        if curve is None:
            continue
        others = [o for k, o in enumerate(parts) if k != idx]
        cells = (np.arange(resolution) + 0.5) / resolution
        mids = curve.point(cells)
        mask = np.ones(resolution, dtype=bool)
        for o in others:
            mask &= o.closure(mids)
        # drop cells where the domain does not actually touch the curve
        normal_probe = mids + 1e-6 * _inward(curve, cells, part)
        mask &= membership(normal_probe)
        for a, b, full in _runs(mask, curve.closed):
            if full:
                pieces.append(curve)
                continue
            lo_out, hi_out = (a - 0.5) / resolution, (b + 1.5) / resolution
            if not curve.closed:
                lo_out, hi_out = max(lo_out, 0.0), min(hi_out, 1.0)
            t_lo = _refine(curve, others, (a + 0.5) / resolution, lo_out)
            t_hi = _refine(curve, others, (b + 0.5) / resolution, hi_out)
            if isinstance(curve, Arc):
                pieces.append(Arc(curve.center, curve.radius,
                                  curve.theta0 + t_lo * curve.span, (t_hi - t_lo) * curve.span,
                                  tag=f"part{idx}"))
            else:
                pieces.append(Segment(complex(curve.point(t_lo)), complex(curve.point(t_hi)),
                                      tag=f"part{idx}"))
    if not pieces:
        raise EmptyIntersection("intersection has no boundary within r_max")
    J = BoundarySet(tuple(pieces), compact=True)
    ring = r_max * np.exp(1j * TWO_PI * np.arange(64) / 64)
    bounded = not membership(ring).any()
    if bounded:
        xs, ys = grid[inside].real, grid[inside].imag
        pad = 2 * ext / (side - 1)
        bbox = (xs.min() - pad, xs.max() + pad, ys.min() - pad, ys.max() + pad)
    else:
        bbox = (-r_max, r_max, -r_max, r_max)
    candidates = []
    for p in parts:
        if isinstance(p, DiscPart):
            candidates += list(p.center + (p.radius + 0.5) * np.exp(1j * TWO_PI * np.arange(8) / 8))
        else:
            c = p.curve(r_max)
            if c is not None:
                for t in np.linspace(0.0, 1.0, 9):
                    candidates.append(complex(c.point(t)) - 0.5 * p.normal)
    poles = _keep_far_poles(candidates, in_closure, J, bbox, POLE_MARGIN)
    return DomainSpec(
        id="intersection:" + ";".join(_part_literal(p) for p in parts),
        title=f"intersection of {len(parts)} discs/half-planes",
        description="intersection of discs and half-planes",
        membership=membership,
        in_closure=in_closure,
        boundary_J=J,
        outline=J,
        pole_sites=poles[:16],
        bounded=bounded,
        bbox=bbox,
        exhaustion_radii=() if bounded else tuple(float(k) for k in range(1, int(r_max) + 1)),
        r_max=r_max,
        notes=() if bounded else (f"unbounded: boundary truncated at R_max = {r_max:g}",),
        params={"parts": parts},
    )


def _inward(curve, t, part):
    if isinstance(part, HalfPlanePart):
        return np.full(np.shape(t), part.normal)
    pts = curve.point(t)
    return (part.center - pts) / np.abs(part.center - pts)


def _part_literal(p) -> str:
    if isinstance(p, DiscPart):
        return f"disc({_complex_literal(p.center)},{p.radius:.17g})"
    return f"half({_complex_literal(p.point)},{_complex_literal(p.normal)})"


# ----- negative controls


def make_slit_disc(j_interval: tuple = (0.0, 0.5)) -> DomainSpec:
    """Unit disc minus the slit [0, 1/2]; J is (a sub-interval of) the slit."""
    lo, hi = map(float, j_interval)
    if not 0.0 <= lo < hi <= 0.5:
        raise ValueError("J must be a sub-interval of the slit [0, 0.5]")
    slit = Segment(0j, 0.5 + 0j, tag="slit")
    circle = Arc(0j, 1.0, 0.0, TWO_PI, tag="T")
    J = BoundarySet((Segment(complex(lo), complex(hi), tag="slit"),))

    def membership(z):
        z = np.asarray(z)
        on_slit = (np.abs(z.imag) <= GEOM_TOL) & (z.real >= -GEOM_TOL) & (z.real <= 0.5 + GEOM_TOL)
        return (np.abs(z) < 1.0) & ~on_slit

    ring = tuple(complex(2.0 * np.exp(1j * TWO_PI * k / 8)) for k in range(8))
    return DomainSpec(
        id="slit-disc",
        title="unit disc minus the slit [0, 1/2]",
        description="disc minus a slit, J on the slit",
        membership=membership,
        in_closure=lambda z: np.abs(z) <= 1.0 + GEOM_TOL,
        boundary_J=J,
        outline=BoundarySet((circle, slit)),
        pole_sites=ring,
        bounded=True,
        bbox=(-1.0, 1.0, -1.0, 1.0),
        negative_control=True,
        notes=("NEGATIVE_CONTROL: every function continuous on the closure and holomorphic "
               "off the slit extends holomorphically across it",),
        params={"j_interval": (lo, hi)},
    )


def make_half_plane_minus_ray(j_interval: tuple | None = None, r_max: float = R_MAX) -> DomainSpec:
    """Right half-plane minus the ray [1, +inf), truncated to [1, r_max]."""
    lo, hi = (1.0, r_max) if j_interval is None else map(float, j_interval)
    if not 1.0 <= lo < hi <= r_max:
        raise ValueError("J must be a sub-interval of the truncated ray [1, r_max]")
    ray = Segment(1.0 + 0j, complex(r_max), tag="ray")
    axis = Segment(complex(0, -r_max), complex(0, r_max), tag="iR")
    J = BoundarySet((Segment(complex(lo), complex(hi), tag="ray"),))

    def membership(z):
        z = np.asarray(z)
        on_ray = (np.abs(z.imag) <= GEOM_TOL) & (z.real >= 1.0 - GEOM_TOL)
        return (z.real > 0.0) & ~on_ray

    return DomainSpec(
        id="half-plane-minus-ray",
        title="right half-plane minus the ray [1, +inf)",
        description="half-plane minus a ray, J on the ray",
        membership=membership,
        in_closure=lambda z: np.real(z) >= -GEOM_TOL,
        boundary_J=J,
        outline=BoundarySet((axis, ray)),
        pole_sites=_right_half_plane_poles(4),
        bounded=False,
        bbox=(0.0, r_max, -r_max, r_max),
        exhaustion_radii=tuple(float(k) for k in range(1, int(r_max) + 1)),
        negative_control=True,
        r_max=r_max,
        notes=("NEGATIVE_CONTROL: functions extend holomorphically across the ray",
               f"ray truncated to [1, {r_max:g}]"),
        params={"j_interval": (lo, hi), "r_max": r_max},
    )


# ---------------------------------------------------------------- sampling


def _allocate(weights: list[float], count: int) -> list[int]:
    # largest-remainder apportionment, deterministic tie-break by index
    total = sum(weights)
    if total <= 0 or count <= 0:
        return [0] * len(weights)
    raw = [count * w / total for w in weights]
    out = [int(math.floor(r)) for r in raw]
    rest = count - sum(out)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - out[i]), i))
    for i in order[:rest]:
        out[i] += 1
    return out


def sample_J_near(domain: DomainSpec, z0: JSample, delta: float, count: int) -> list[JSample]:
    """Points of J in the punctured closed disc ``0 < |z - z0| <= delta``.

    Samples are spread uniformly in the piece parameter over every piece that
    meets the disc, proportionally to arc length; on pieces through ``z0``
    they march outward from ``z0`` on each side.
    """
    if count < 1 or not delta > 0:
        raise ValueError("count must be >= 1 and delta > 0")
    c0 = complex(z0.point)
    floor = SAMPLER_FLOOR * (1.0 + abs(c0))
    if delta < floor:
        return []
    # sides: (piece index, anchor parameter, signed parameter extent) for sides
    # marching away from z0, or (piece index, lo, hi) for plain intervals
    sides = []
    for i, piece in enumerate(domain.boundary_J.pieces):
        for lo, hi in piece.window(c0, delta):
            if hi - lo <= 0:
                continue
            anchor = None
            if i == z0.piece_index and lo - 1e-15 <= z0.parameter <= hi + 1e-15:
                anchor = z0.parameter
            elif piece.closed and i == z0.piece_index:
                for shift in (-1.0, 1.0):
                    if lo <= z0.parameter + shift <= hi:
                        anchor = z0.parameter + shift
            else:
                for end in (lo, hi):
                    if abs(complex(piece.point(end % 1.0 if piece.closed else end)) - c0) < floor:
                        anchor = end
            if anchor is None:
                sides.append(("span", i, lo, hi))
            else:
                if anchor - lo > 0:
                    sides.append(("ray", i, anchor, lo - anchor))
                if hi - anchor > 0:
                    sides.append(("ray", i, anchor, hi - anchor))
    if not sides:
        return []

    def weight(s):
        piece = domain.boundary_J.pieces[s[1]]
        extent = (s[3] - s[2]) if s[0] == "span" else abs(s[3])
        return extent * piece.length

    counts = _allocate([weight(s) for s in sides], count)
    out = []
    limit = delta * (1.0 + 1e-12)
    for s, m in zip(sides, counts):
        if m == 0:
            continue
        piece = domain.boundary_J.pieces[s[1]]
        if s[0] == "ray":
            # shrink by 1e-9 so the outermost sample stays inside the window
            # despite rounding in the window end computed from z0's coordinates
            ts = s[2] + s[3] * (1.0 - 1e-9) * (np.arange(1, m + 1) / m)
        elif m == 1:
            ts = np.array([0.5 * (s[2] + s[3])])
        else:
            ts = s[2] + (s[3] - s[2]) * (np.arange(m) / (m - 1))
        if piece.closed:
            ts = np.mod(ts, 1.0)
        pts = piece.point(ts)
        dist = np.abs(pts - c0)
        for t, z, d in zip(ts, pts, dist):
            if 0.0 < d <= limit:
                out.append(JSample(complex(z), s[1], float(t)))
    return out


def grid_J(domain: DomainSpec, count: int) -> list[JSample]:
    """``count`` base points spread over J proportionally to piece length."""
    pieces = domain.boundary_J.pieces
    counts = _allocate([p.length for p in pieces], count)
    out = []
    for i, (piece, m) in enumerate(zip(pieces, counts)):
        if m == 0:
            continue
        ts = np.arange(m) / m if piece.closed else (np.arange(m) + 0.5) / m
        for t in ts:
            out.append(domain.sample(i, float(t)))
    return out


def seminorm(domain: DomainSpec, f, m: float, grid_density: int = 200) -> float:
    """``sup |f|`` over closure points with ``|z| <= m`` (grid approximation)."""
    xmin, xmax, ymin, ymax = domain.bbox
    xmin, xmax = max(xmin, -m), min(xmax, m)
    ymin, ymax = max(ymin, -m), min(ymax, m)
    X, Y = np.meshgrid(np.linspace(xmin, xmax, grid_density),
                       np.linspace(ymin, ymax, grid_density))
    pts = [(X + 1j * Y).ravel()]
    pts.append(outline_samples(domain.outline, 8 * grid_density))
    pts.append(m * np.exp(1j * TWO_PI * np.arange(8 * grid_density) / (8 * grid_density)))
    z = np.concatenate(pts)
    z = z[domain.in_closure(z) & (np.abs(z) <= m * (1 + 1e-12))]
    if z.size == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(f(z)))))


# ---------------------------------------------------------------- catalog ids

CATALOG = {
    "disc": ("unit disc, J the circle", False),
    "half-plane": ("right half-plane, J_n = [-in, in]", False),
    "sector": ("sector pi/4..3pi/4, J = two radii and the arc", False),
    "polygon:<vertex-list>": ("convex polygon, J the edges", False),
    "intersection:<spec>": ("intersection of discs and half-planes", False),
    "square-minus-disc": ("square minus the open disc", False),
    "slit-disc": ("disc minus a slit, J on the slit", True),
    "half-plane-minus-ray": ("half-plane minus a ray, J on the ray", True),
}


def _parse_complex_list(text: str) -> list[complex]:
    return [complex(tok.strip().replace(" ", "")) for tok in text.split(",") if tok.strip()]


def parse_parts(text: str) -> list:
    """Parse ``disc(c,r);half(p,n)`` into part objects."""
    parts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        name, _, rest = chunk.partition("(")
        args = rest.rstrip(")").split(",")
        if name == "disc" and len(args) == 2:
            parts.append(DiscPart(complex(args[0]), float(args[1])))
        elif name == "half" and len(args) == 2:
            parts.append(HalfPlanePart(complex(args[0]), complex(args[1])))
        else:
            raise UnknownDomain(f"cannot parse intersection part {chunk!r}")
    return parts


def domain_from_id(spec: str, *, n_max: int = 4, r_max: float = R_MAX,
                   half_side: float = 1.0, j_interval=None) -> DomainSpec:
    """Build a catalog domain from its string id."""
    name, _, arg = spec.partition(":")
    if name == "disc":
        return make_unit_disc()
    if name == "half-plane":
        return make_right_half_plane(n_max, r_max)
    if name == "sector":
        return make_sector()
    if name == "polygon":
        return make_convex_polygon(_parse_complex_list(arg))
    if name == "square-minus-disc":
        return make_square_minus_disc(half_side)
    if name == "intersection":
        return make_intersection(parse_parts(arg), r_max=r_max)
    if name == "slit-disc":
        return make_slit_disc(j_interval or (0.0, 0.5))
    if name == "half-plane-minus-ray":
        return make_half_plane_minus_ray(j_interval, r_max)
    raise UnknownDomain(f"unknown domain id {spec!r}")
