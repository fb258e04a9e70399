"""Rational functions with poles off the closure, fixed-pole least squares,
and perturbation experiments on blowup certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .domains import DomainSpec, closure_samples, grid_J
from .errors import NdposError
from .quotient import (
    ScaleLadder,
    certify_blowup,
    profile,
)

NEAR_POLE = 1e-12
RANK_RTOL = 1e-10
SAFETY = 1.05


class RationalError(NdposError):
    tag = "RationalError"


class NearPole(RationalError):
    tag = "NearPole"


class NoPoleSites(RationalError):
    tag = "NoPoleSites"


class RankDeficient(RationalError):
    tag = "RankDeficient"


@dataclass(frozen=True)
class RationalFunction:
    """``sum_k polynomial[k] z**k + sum_j sum_m coefficients[j][m-1] / (z - poles[j])**m``.

    The order of pole ``j`` is ``len(coefficients[j])``.
    """

    poles: tuple = ()
    coefficients: tuple = ()
    polynomial: tuple = ()

    tolerance = 0.0

    def __post_init__(self):
        poles = tuple(complex(p) for p in self.poles)
        coeffs = tuple(tuple(complex(c) for c in row) for row in self.coefficients)
        if len(poles) != len(coeffs):
            raise RationalError("one coefficient row per pole is required")
        if any(len(row) == 0 for row in coeffs):
            raise RationalError("every pole needs order >= 1")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "polynomial", tuple(complex(c) for c in self.polynomial))

    @property
    def orders(self) -> tuple:
        return tuple(len(row) for row in self.coefficients)

    @classmethod
    def simple(cls, pole: complex, coefficient: complex = 1.0) -> "RationalFunction":
        return cls((pole,), ((coefficient,),))

    def _check(self, z):
        for p in self.poles:
            if np.any(np.abs(z - p) < NEAR_POLE):
                raise NearPole(f"evaluation within {NEAR_POLE:g} of the pole {p}")

    def __call__(self, z):
        return eval_rational(self, z)

    def derivative(self, z):
        return eval_rational_derivative(self, z)

    @property
    def name(self) -> str:
        return f"rational({len(self.poles)} poles, degree {len(self.polynomial) - 1})"

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return NotImplemented
        n = max(len(self.polynomial), len(other.polynomial))
        poly = [0j] * n
        for i, c in enumerate(self.polynomial):
            poly[i] += c
        for i, c in enumerate(other.polynomial):
            poly[i] += c
        return RationalFunction(self.poles + other.poles,
                                self.coefficients + other.coefficients, tuple(poly))


def eval_rational(q: RationalFunction, z):
    """Partial-fraction evaluation; raises :class:`NearPole` within 1e-12 of a pole."""
    arr = np.asarray(z, dtype=complex)
    q._check(arr)
    out = np.zeros(arr.shape, dtype=complex)
    for c in reversed(q.polynomial):
        out = out * arr + c
    for p, row in zip(q.poles, q.coefficients):
        inv = 1.0 / (arr - p)
        power = inv
        for c in row:
            out = out + c * power
            power = power * inv
    return complex(out) if out.ndim == 0 else out


def eval_rational_derivative(q: RationalFunction, z):
    """Term-wise derivative of :func:`eval_rational`."""
    arr = np.asarray(z, dtype=complex)
    q._check(arr)
    out = np.zeros(arr.shape, dtype=complex)
    deg = len(q.polynomial) - 1
    for k in range(deg, 0, -1):
        out = out * arr + k * q.polynomial[k]
    for p, row in zip(q.poles, q.coefficients):
        inv = 1.0 / (arr - p)
        power = inv * inv
        for m, c in enumerate(row, start=1):
            out = out - m * c * power
            power = power * inv
    return complex(out) if out.ndim == 0 else out


def derivative_bound_on_J(q: RationalFunction, domain: DomainSpec, density: int = 4096) -> float:
    """``1.05 * max |q'|`` over a dense grid of J."""
    pts = np.array([s.point for s in grid_J(domain, density)])
    ends = []
    for piece in domain.boundary_J.pieces:
        ends.extend([complex(piece.point(0.0)), complex(piece.point(1.0))])
    pts = np.concatenate([pts, ends])
    return SAFETY * float(np.max(np.abs(eval_rational_derivative(q, pts))))


def min_pole_distance(q: RationalFunction, domain: DomainSpec, count: int = 10_000) -> float:
    if not q.poles:
        return math.inf
    pts = closure_samples(domain, count)
    return float(min(np.min(np.abs(pts - p)) for p in q.poles))


def random_rational(domain: DomainSpec, num_poles: int, coeff_scale: float, seed: int,
                    max_order: int = 1) -> RationalFunction:
    """Seeded random rational with poles jittered around the domain's pole sites.

    Pole sites are drawn without replacement while possible; jitter is at
    most a quarter of the pole margin and coefficients are uniform in the
    disc of radius ``coeff_scale``.
    """
    sites = domain.pole_sites
    if not sites:
        raise NoPoleSites(f"{domain.id} declares no pole sites")
    rng = np.random.default_rng(seed)
    replace = num_poles > len(sites)
    idx = rng.choice(len(sites), size=num_poles, replace=replace)
    jitter_r = 0.25 * domain.pole_margin * np.sqrt(rng.uniform(size=num_poles))
    jitter = jitter_r * np.exp(2j * math.pi * rng.uniform(size=num_poles))
    poles = [complex(sites[i]) + complex(j) for i, j in zip(idx, jitter)]
    orders = rng.integers(1, max_order + 1, size=num_poles)
    rows = []
    for m in orders:
        r = coeff_scale * np.sqrt(rng.uniform(size=m))
        rows.append(tuple(r * np.exp(2j * math.pi * rng.uniform(size=m))))
    return RationalFunction(tuple(poles), tuple(rows))


@dataclass(frozen=True)
class FitResult:
    rational: RationalFunction
    max_error: float
    rms_error: float
    residual_norm: float
    rank: int
    columns: int
    note: str = ("least squares over a fixed pole family: shows residual shrinkage "
                 "within this family, not arbitrary-epsilon approximation")


def _design(z, poles, orders, degree):
    cols = [z**k for k in range(degree + 1)] if degree >= 0 else []
    for p, m in zip(poles, orders):
        inv = 1.0 / (z - p)
        power = inv
        for _ in range(m):
            cols.append(power)
            power = power * inv
    return np.column_stack(cols) if cols else np.empty((z.size, 0), dtype=complex)


def fit_fixed_poles(points, values, poles=(), degree: int = 0, orders=1) -> FitResult:
    """Least-squares coefficients for a fixed pole family.

    ``orders`` is an int (same order for every pole) or a sequence.  The
    system is column-scaled and solved by pivoted QR; a diagonal entry of
    R below ``1e-10`` times the largest one raises :class:`RankDeficient`.
    """
    z = np.asarray(points, dtype=complex).ravel()
    y = np.asarray(values, dtype=complex).ravel()
    poles = tuple(complex(p) for p in poles)
    if isinstance(orders, int):
        orders = (orders,) * len(poles)
    orders = tuple(int(m) for m in orders)
    ncols = (degree + 1 if degree >= 0 else 0) + sum(orders)
    if ncols == 0:
        raise RankDeficient("empty coefficient family")
    if z.size < ncols:
        raise RankDeficient(f"{z.size} samples for {ncols} coefficients")
    for p in poles:
        if np.any(np.abs(z - p) < NEAR_POLE):
            raise NearPole(f"sample point on the pole {p}")
    A = _design(z, poles, orders, degree)
    scale = np.linalg.norm(A, axis=0)
    if np.any(scale == 0):
        raise RankDeficient("zero column in the design matrix")
    As = A / scale
    Q, R, piv = scipy.linalg.qr(As, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_RTOL * diag[0]))
    if rank < ncols:
        raise RankDeficient(f"numerical rank {rank} < {ncols} columns")
    sol = np.zeros(ncols, dtype=complex)
    sol[piv] = scipy.linalg.solve_triangular(R, Q.conj().T @ y)
    coef = sol / scale
    k = degree + 1 if degree >= 0 else 0
    poly = tuple(coef[:k])
    rows = []
    for m in orders:
        rows.append(tuple(coef[k:k + m]))
        k += m
    q = RationalFunction(poles, tuple(rows), poly)
    resid = eval_rational(q, z) - y
    return FitResult(q, float(np.max(np.abs(resid))), float(np.sqrt(np.mean(np.abs(resid) ** 2))),
                     float(np.linalg.norm(resid)), rank, ncols)


# ---------------------------------------------------------------- serialization


def dumps(q: RationalFunction) -> str:
    """Text form: polynomial coefficients ascending, then one line per pole."""
    lines = ["ndpos-rational 1"]
    lines.append("poly " + " ".join(f"{c.real!r} {c.imag!r}" for c in q.polynomial))
    for p, row in zip(q.poles, q.coefficients):
        coeffs = " ".join(f"{c.real!r} {c.imag!r}" for c in row)
        lines.append(f"pole {p.real!r} {p.imag!r} order {len(row)} coeffs {coeffs}")
    return "\n".join(lines) + "\n"


def _pairs(tokens):
    vals = [float(t) for t in tokens]
    if len(vals) % 2:
        raise RationalError("odd number of real components")
    return [complex(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def loads(text: str) -> RationalFunction:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ndpos-rational"):
        raise RationalError("missing ndpos-rational header")
    poly, poles, rows = [], [], []
    for ln in lines[1:]:
        tok = ln.split()
        if tok[0] == "poly":
            poly = _pairs(tok[1:])
        elif tok[0] == "pole":
            loc = complex(float(tok[1]), float(tok[2]))
            if tok[3] != "order" or tok[5] != "coeffs":
                raise RationalError(f"malformed pole line {ln!r}")
            order = int(tok[4])
            coeffs = _pairs(tok[6:])
            if len(coeffs) != order:
                raise RationalError(f"pole order {order} but {len(coeffs)} coefficients")
            poles.append(loc)
            rows.append(tuple(coeffs))
        else:
            raise RationalError(f"unknown line {ln!r}")
    return RationalFunction(tuple(poles), tuple(rows), tuple(poly))


# ---------------------------------------------------------------- perturbation


class Sum:
    """Pointwise sum of two evaluables; tolerances add."""

    def __init__(self, f, q):
        self.f, self.q = f, q
        self.tolerance = float(getattr(f, "tolerance", 0.0)) + float(getattr(q, "tolerance", 0.0))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.asarray(self.f(z)) + np.asarray(self.q(z))

    @property
    def name(self) -> str:
        return f"{getattr(self.f, 'name', 'f')} + {getattr(self.q, 'name', 'q')}"

    def derivative(self, z):
        return self.f.derivative(z) + self.q.derivative(z)


@dataclass(frozen=True)
class TrianglePair:
    z: complex
    z0: complex
    q_sum: float
    q_f: float
    q_q: float
    margin: float  # q_sum - (q_f - q_q)
    rounding: float  # floating-point error bound on the three quotients


@dataclass(frozen=True)
class InvarianceRow:
    z0: complex
    slope_f: float
    slope_fq: float
    passed_f: bool  # with M_crit raised by the derivative bound of q
    passed_fq: bool
    implication_holds: bool
    pairs: tuple


@dataclass(frozen=True)
class InvarianceReport:
    rows: tuple
    M_hat: float
    slope_min: float
    M_crit: float

    @property
    def all_hold(self) -> bool:
        return all(r.implication_holds for r in self.rows)

    @property
    def triangle_ok(self) -> bool:
        return all(p.margin >= -p.rounding for r in self.rows for p in r.pairs)


def _triangle(f, q, z: complex, z0: complex) -> TrianglePair:
    pts = np.array([z, z0], dtype=complex)
    fv = np.asarray(f(pts), dtype=complex)
    qv = np.asarray(q(pts), dtype=complex)
    sv = fv + qv
    d = abs(z - z0)
    qs = abs(sv[0] - sv[1]) / d
    qf = abs(fv[0] - fv[1]) / d
    qq = abs(qv[0] - qv[1]) / d
    eps = np.finfo(float).eps
    rounding = 8 * eps * float(np.sum(np.abs(fv)) + np.sum(np.abs(qv))) / d
    return TrianglePair(z, z0, qs, qf, qq, qs - (qf - qq), rounding)


def perturbation_invariance(f, q: RationalFunction, domain: DomainSpec, grid,
                            ladder: ScaleLadder, slope_min: float, M_crit: float) -> InvarianceReport:
    """Profiles of ``f`` and ``f + q`` at each base point.

    The implication checked per point: if the certificate of ``f`` passes
    with ``M_crit`` raised by ``derivative_bound_on_J(q)``, then the
    certificate of ``f + q`` passes with ``M_crit``.  The triangle inequality
    ``Q(f+q) >= Q(f) - Q(q)`` is checked at every recorded argmax pair of
    both profiles.
    """
    M_hat = derivative_bound_on_J(q, domain)
    fq = Sum(f, q)
    rows = []
    for z0 in grid:
        pf = profile(f, domain, z0, ladder)
        pfq = profile(fq, domain, z0, ladder)
        cf = certify_blowup(pf, slope_min, M_crit + M_hat)
        cfq = certify_blowup(pfq, slope_min, M_crit)
        pairs = []
        for s in list(pf.argmax) + list(pfq.argmax):
            if s is not None:
                pairs.append(_triangle(f, q, s.point, z0.point))
        rows.append(InvarianceRow(complex(z0.point), cf.growth_slope, cfq.growth_slope,
                                  cf.passed, cfq.passed, (not cf.passed) or cfq.passed,
                                  tuple(pairs)))
    return InvarianceReport(tuple(rows), M_hat, slope_min, M_crit)
