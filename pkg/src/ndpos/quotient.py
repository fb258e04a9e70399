"""Multiscale difference quotients along a boundary set.

The lim sup of ``|f(z) - f(z0)| / |z - z0|`` as ``z -> z0`` along ``J`` is
replaced by window maxima on a geometric ladder of scales.  Everything here
is a finite-scale surrogate: a passing certificate is empirical evidence of
blowup, never a proof.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .domains import DomainSpec, JSample, grid_J, sample_J_near
from .errors import NdposError

EPS_LOG = 1e-300
#: quotients above n are trusted only if delta * n exceeds this multiple of the tolerance
SCALE_FLOOR_FACTOR = 100.0
#: noise-floor rule: delta_depth * M_crit must exceed this multiple of the tolerance
NOISE_FLOOR_FACTOR = 10.0


class QuotientError(NdposError):
    tag = "QuotientError"


class EmptyWindow(QuotientError):
    tag = "EmptyWindow"


class InsufficientScales(QuotientError):
    tag = "InsufficientScales"


class Underpowered(QuotientError):
    tag = "Underpowered"


class DerivativeUnavailable(QuotientError):
    tag = "DerivativeUnavailable"


@dataclass(frozen=True)
class ScaleLadder:
    """Scales ``delta_k = delta0 * rho**(k-1)`` for ``k = 1..depth``."""

    delta0: float
    rho: float
    depth: int
    samples_per_scale: int = 256

    def __post_init__(self):
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.depth < 2:
            raise ValueError("depth must be >= 2")
        if self.samples_per_scale < 8:
            raise ValueError("samples_per_scale must be >= 8")

    @property
    def deltas(self) -> np.ndarray:
        return self.delta0 * self.rho ** np.arange(self.depth, dtype=float)

    @classmethod
    def parse(cls, text: str) -> "ScaleLadder":
        """From ``"delta0,rho,depth,samples"``; ``rho`` may be written ``1/13``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) not in (3, 4):
            raise ValueError("ladder needs delta0,rho,depth[,samples]")
        rho = parts[1]
        if "/" in rho:
            num, den = rho.split("/")
            rho_val = float(num) / float(den)
        else:
            rho_val = float(rho)
        samples = int(parts[3]) if len(parts) == 4 else 256
        return cls(float(parts[0]), rho_val, int(parts[2]), samples)


def default_ladder(b: int) -> ScaleLadder:
    return ScaleLadder(0.3, 1.0 / b, 6, 256)


@dataclass(frozen=True)
class QuotientProfile:
    """Windowed maxima ``M[k-1]`` of the difference quotient at ``z0``.

    Skipped scales (empty windows) carry ``nan`` in ``M`` and ``None`` in
    ``argmax``.
    """

    z0: JSample
    ladder: ScaleLadder
    deltas: tuple
    M: tuple
    argmax: tuple
    counts: tuple
    tolerance: float = 0.0
    skipped: tuple = ()

    @property
    def usable(self) -> list[int]:
        return [k for k, m in enumerate(self.M) if not math.isnan(m)]

    def as_array(self) -> np.ndarray:
        return np.array(self.M, dtype=float)


def _evaluate(f, z) -> np.ndarray:
    return np.asarray(f(np.asarray(z, dtype=complex)), dtype=complex)


def window_quotients(f, domain: DomainSpec, z0: JSample, delta: float, count: int, f0=None):
    """Samples of J in the punctured window and their quotients, in piece-then-parameter order."""
    samples = sample_J_near(domain, z0, delta, count)
    samples.sort(key=lambda s: (s.piece_index, s.parameter))
    if not samples:
        return samples, np.empty(0)
    pts = np.array([s.point for s in samples], dtype=complex)
    c0 = complex(z0.point)
    if f0 is None:
        f0 = _evaluate(f, [c0])[0]
    q = np.abs(_evaluate(f, pts) - f0) / np.abs(pts - c0)
    return samples, q


def profile(f, domain: DomainSpec, z0: JSample, ladder: ScaleLadder) -> QuotientProfile:
    """Window maxima of the difference quotient over the ladder's scales.

    Empty windows are recorded in ``skipped`` and left out of the analysis.
    """
    c0 = complex(z0.point)
    f0 = _evaluate(f, [c0])[0]
    M, arg, counts, skipped = [], [], [], []
    deltas = ladder.deltas
    for k, delta in enumerate(deltas):
        samples, q = window_quotients(f, domain, z0, float(delta), ladder.samples_per_scale, f0)
        counts.append(len(samples))
        if not samples:
            M.append(float("nan"))
            arg.append(None)
            skipped.append(k + 1)
            continue
        if not np.all(np.isfinite(q)):
            raise QuotientError(f"non-finite quotient at scale {k + 1} for z0 = {c0}")
        i = int(np.argmax(q))  # first maximal sample wins ties
        M.append(float(q[i]))
        arg.append(samples[i])
    return QuotientProfile(
        z0=z0,
        ladder=ladder,
        deltas=tuple(float(d) for d in deltas),
        M=tuple(M),
        argmax=tuple(arg),
        counts=tuple(counts),
        tolerance=float(getattr(f, "tolerance", 0.0)),
        skipped=tuple(skipped),
    )


def profile_grid(f, domain: DomainSpec, grid, ladder: ScaleLadder, workers: int = 1) -> list[QuotientProfile]:
    """Profiles at every base point; order follows ``grid`` for any worker count."""
    if workers <= 1:
        return [profile(f, domain, z0, ladder) for z0 in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda z0: profile(f, domain, z0, ladder), grid))


def default_thresholds(params) -> tuple[float, float]:
    """``(slope_min, M_crit)`` for a Weierstrass seed: ``0.5*ln(ab)`` and 10."""
    return 0.5 * math.log(params.a * params.b), 10.0


DEFAULT_CROSSING_LEVELS = tuple(
    m * 10**e for e in range(0, 12) for m in (1, 2, 5)
)


@dataclass(frozen=True)
class BlowupCertificate:
    z0: JSample
    passed: bool
    growth_slope: float
    final_M: float
    slope_min: float
    M_crit: float
    crossings: tuple = field(default=())

    def crossings_text(self) -> str:
        return " ".join(f"{n}@{k}" for n, k in self.crossings)


def check_noise_floor(profile_: QuotientProfile, M_crit: float) -> None:
    """Reject ladders whose finest scale cannot separate ``M_crit`` from evaluation noise."""
    finest = profile_.deltas[-1]
    tol = profile_.tolerance
    if tol > 0 and not finest * M_crit > NOISE_FLOOR_FACTOR * tol:
        raise Underpowered(
            f"delta_depth * M_crit = {finest * M_crit:.3g} does not exceed "
            f"{NOISE_FLOOR_FACTOR:g} * tolerance = {NOISE_FLOOR_FACTOR * tol:.3g}"
        )


def growth_slope(profile_: QuotientProfile) -> float:
    ks = np.array(profile_.usable, dtype=float) + 1.0
    logs = np.log(np.maximum(np.array([profile_.M[int(k) - 1] for k in ks]), EPS_LOG))
    return float(np.polyfit(ks, logs, 1)[0])


def certify_blowup(profile_: QuotientProfile, slope_min: float, M_crit: float,
                   levels=DEFAULT_CROSSING_LEVELS) -> BlowupCertificate:
    """Pass iff the log-slope of ``M_k`` against ``k`` is at least ``slope_min``
    and the finest usable ``M_k`` reaches ``M_crit``.

    Raises
    ------
    InsufficientScales
        Fewer than three usable scales.
    Underpowered
        The noise-floor rule fails for this profile.
    """
    usable = profile_.usable
    if len(usable) < 3:
        raise InsufficientScales(f"{len(usable)} usable scales, need >= 3")
    check_noise_floor(profile_, M_crit)
    slope = growth_slope(profile_)
    final = profile_.M[usable[-1]]
    crossings = []
    tol = profile_.tolerance
    for n in levels:
        for k in usable:
            trusted = profile_.deltas[k] * n > SCALE_FLOOR_FACTOR * tol
            if trusted and profile_.M[k] > n:
                crossings.append((n, k + 1))
                break
    passed = slope >= slope_min and final >= M_crit
    return BlowupCertificate(profile_.z0, bool(passed), slope, float(final),
                             float(slope_min), float(M_crit), tuple(crossings))


# ---------------------------------------------------------------- E_n


@dataclass(frozen=True)
class EnWitness:
    z0: JSample
    witness: JSample | None
    quotient: float | None
    distance: float | None

    @property
    def found(self) -> bool:
        return self.witness is not None


@dataclass(frozen=True)
class EnTestReport:
    n: int
    grid: tuple
    witnesses: tuple
    samples: int
    levels: int

    @property
    def all_found(self) -> bool:
        return all(w.found for w in self.witnesses)

    @property
    def none_found(self) -> bool:
        return not any(w.found for w in self.witnesses)

    @property
    def found_count(self) -> int:
        return sum(w.found for w in self.witnesses)


def en_search(f, domain: DomainSpec, z0: JSample, n: int, samples: int = 64,
              levels: int = 6, rho: float = 0.1) -> EnWitness:
    """Look for ``z`` in J with ``0 < |z - z0| < 1/n`` and quotient ``> n``.

    The open disc is searched through nested windows of radii
    ``(1/n) * rho**j`` for ``j = 0..levels-1``, each with ``samples`` points;
    the first witness in that order is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    c0 = complex(z0.point)
    f0 = _evaluate(f, [c0])[0]
    tol = float(getattr(f, "tolerance", 0.0))
    radius = 1.0 / n
    for j in range(levels):
        # strictly inside the open disc D(z0, 1/n)
        delta = radius * rho**j * (1.0 - 1e-9)
        cand, q = window_quotients(f, domain, z0, delta, samples, f0)
        for s, qv in zip(cand, q):
            dist = abs(s.point - c0)
            if qv > n and dist < radius and n * dist > SCALE_FLOOR_FACTOR * tol:
                return EnWitness(z0, s, float(qv), float(dist))
    return EnWitness(z0, None, None, None)


def en_test(f, domain: DomainSpec, n: int, grid_density: int, samples: int = 64,
            levels: int = 6, rho: float = 0.1, workers: int = 1) -> EnTestReport:
    """Finite-scale membership test for ``E_n`` on a grid of ``grid_density`` base points."""
    grid = grid_J(domain, grid_density)

    def one(z0):
        return en_search(f, domain, z0, n, samples, levels, rho)

    if workers <= 1:
        found = [one(z0) for z0 in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(one, grid))
    return EnTestReport(n, tuple(grid), tuple(found), samples, levels)


# ---------------------------------------------------------------- bounded baseline


@dataclass(frozen=True)
class PlateauReport:
    z0: JSample
    derivative_modulus: float
    M: tuple
    guards: tuple
    finest_relative_error: float
    finest_ok: bool
    bounded_ok: bool
    plateau_tol: float

    @property
    def passed(self) -> bool:
        return self.finest_ok and self.bounded_ok


def bounded_quotient_check(f, domain: DomainSpec, z0: JSample, ladder: ScaleLadder,
                           derivative=None, plateau_tol: float = 0.05,
                           finest_tol: float = 0.05) -> PlateauReport:
    """Check that the profile plateaus at ``|f'(z0)|``.

    The finest ``M_k`` must be within ``finest_tol`` of ``|f'(z0)|`` and every
    ``M_k`` at most ``|f'(z0)| * (1 + plateau_tol) + guard_k``.  The additive
    guard is the Taylor remainder bound ``K * delta_k / 2`` with ``K`` twice
    the largest derivative difference quotient seen in the coarsest window.
    """
    deriv = derivative if derivative is not None else getattr(f, "derivative", None)
    if deriv is None:
        raise DerivativeUnavailable("no derivative available for the plateau check")
    prof = profile(f, domain, z0, ladder)
    c0 = complex(z0.point)
    d0 = complex(_evaluate(deriv, [c0])[0])
    dmod = abs(d0)
    usable = prof.usable
    if not usable:
        raise EmptyWindow("no usable scale")
    # curvature bound from the derivative along the coarsest window
    samples = sample_J_near(domain, z0, prof.deltas[usable[0]], ladder.samples_per_scale)
    if samples:
        pts = np.array([s.point for s in samples])
        dq = np.abs(_evaluate(deriv, pts) - d0) / np.abs(pts - c0)
        K = 2.0 * float(np.max(dq))
    else:
        K = 0.0
    guards = tuple(0.5 * K * d for d in prof.deltas)
    finest = prof.M[usable[-1]]
    rel = abs(finest - dmod) / dmod if dmod > 0 else abs(finest)
    finest_ok = rel <= finest_tol
    bounded_ok = all(prof.M[k] <= dmod * (1 + plateau_tol) + guards[k] for k in usable)
    return PlateauReport(z0, dmod, prof.M, guards, float(rel), bool(finest_ok),
                         bool(bounded_ok), plateau_tol)
