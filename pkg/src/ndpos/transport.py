"""Closed-form conformal maps and the pull-back of functions along them.

Convention: a :class:`TransportMap` ``phi`` maps the *new* domain (where the
transported function lives) into the domain of the source function ``f``,
and the transported function is ``f o phi``.  In the usual statement with a
map ``psi`` from the source domain onto the new one, ``phi = psi^{-1}``, so
difference quotients pick up the factor ``|phi'(w0)| = 1/|psi'(z0)|``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .domains import Arc, BoundarySet, DomainSpec, JSample, Segment, TWO_PI
from .errors import NdposError

DERIV_FLOOR_DELTA = 0.05
DERIV_FLOOR_SAFETY = 0.9


class TransportError(NdposError):
    tag = "TransportError"


class EvaluationAtZero(TransportError):
    tag = "EvaluationAtZero"


class ZeroScale(TransportError):
    tag = "ZeroScale"


class UnknownTransport(TransportError):
    tag = "UnknownTransport"


def _no_probe(n, rng):
    return rng.uniform(-2, 2, n) + 1j * rng.uniform(-2, 2, n)


@dataclass(frozen=True)
class TransportMap:
    """A closed-form map with inverse and derivative.

    ``inverse(z, near=None)`` may take a hint point: for multivalued
    inverses the branch closest to ``near`` is returned.
    """

    name: str
    forward: Callable
    inverse: Callable
    derivative: Callable
    validity_note: str
    probe: Callable = field(default=_no_probe, repr=False, compare=False)

    def __call__(self, w):
        return self.forward(w)


def map_exp_negative() -> TransportMap:
    """``w -> exp(-w)``: right half-plane onto the punctured unit disc."""

    def inverse(z, near=None):
        z = np.asarray(z, dtype=complex)
        w = -np.log(z)
        if near is not None:
            # branch with imaginary part closest to the hint
            k = np.round((np.imag(near) - w.imag) / TWO_PI)
            w = w + 1j * TWO_PI * k
        return w

    def probe(n, rng):
        return rng.uniform(-2.0, 2.0, n) + 1j * rng.uniform(-0.999 * math.pi, 0.999 * math.pi, n)

    return TransportMap(
        name="exp-neg",
        forward=lambda w: np.exp(-np.asarray(w, dtype=complex)),
        inverse=inverse,
        derivative=lambda w: -np.exp(-np.asarray(w, dtype=complex)),
        validity_note="entire with nonvanishing derivative; principal inverse valid on |Im w| < pi, "
                      "other strips of height 2pi through branch hints",
        probe=probe,
    )


def map_reciprocal() -> TransportMap:
    """``w -> 1/w``: exterior of the unit disc onto the punctured disc."""

    def forward(w):
        w = np.asarray(w, dtype=complex)
        if np.any(w == 0):
            raise EvaluationAtZero("1/w evaluated at w = 0")
        return 1.0 / w

    def derivative(w):
        w = np.asarray(w, dtype=complex)
        if np.any(w == 0):
            raise EvaluationAtZero("derivative of 1/w evaluated at w = 0")
        return -1.0 / (w * w)

    def probe(n, rng):
        r = rng.uniform(1.0, 4.0, n)
        return r * np.exp(1j * rng.uniform(0, TWO_PI, n))

    return TransportMap(
        name="reciprocal",
        forward=forward,
        inverse=lambda z, near=None: forward(z),
        derivative=derivative,
        validity_note="injective on C minus {0}; used on |w| >= 1",
        probe=probe,
    )


def map_affine(c: complex, d: complex = 0j) -> TransportMap:
    """``w -> c*w + d`` with ``c != 0``."""
    c, d = complex(c), complex(d)
    if c == 0:
        raise ZeroScale("affine map needs a nonzero scale")
    return TransportMap(
        name=f"affine:{_lit(c)},{_lit(d)}",
        forward=lambda w: c * np.asarray(w, dtype=complex) + d,
        inverse=lambda z, near=None: (np.asarray(z, dtype=complex) - d) / c,
        derivative=lambda w: np.full(np.shape(w), c, dtype=complex),
        validity_note="entire and injective",
    )


def map_rotation_scale(c: complex) -> TransportMap:
    """``w -> c*w``."""
    m = map_affine(c, 0j)
    return TransportMap(f"scale:{_lit(c)}", m.forward, m.inverse, m.derivative, m.validity_note)


def map_rotation(angle: float) -> TransportMap:
    """Rotation ``w -> exp(i*angle) * w``."""
    m = map_affine(complex(np.exp(1j * angle)), 0j)
    return TransportMap(f"rot:{angle!r}", m.forward, m.inverse, m.derivative, m.validity_note)


def _lit(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


class TransportChain:
    """Composition ``w -> maps[-1](...maps[0](w))``."""

    def __init__(self, maps: Sequence[TransportMap]):
        self.maps = tuple(maps)

    @property
    def name(self) -> str:
        return " | ".join(m.name for m in self.maps) or "identity"

    def forward(self, w):
        z = np.asarray(w, dtype=complex)
        for m in self.maps:
            z = m.forward(z)
        return z

    __call__ = forward

    def derivative(self, w):
        z = np.asarray(w, dtype=complex)
        out = np.ones(z.shape, dtype=complex)
        for m in self.maps:
            out = out * m.derivative(z)
            z = m.forward(z)
        return out

    def inverse(self, z, near=None):
        hints = []
        if near is not None:
            h = np.asarray(near, dtype=complex)
            for m in self.maps:
                hints.append(h)
                h = m.forward(h)
        else:
            hints = [None] * len(self.maps)
        w = np.asarray(z, dtype=complex)
        for m, h in zip(reversed(self.maps), reversed(hints)):
            w = m.inverse(w, near=h)
        return w


def as_chain(phi) -> TransportChain:
    if isinstance(phi, TransportChain):
        return phi
    if isinstance(phi, TransportMap):
        return TransportChain([phi])
    return TransportChain(list(phi))


_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_angle(text: str) -> float:
    """Radians from ``"0.5"``, ``"pi/4"``, ``"-3pi/4"`` and similar."""
    t = text.strip().replace(" ", "")
    m = _PI_RE.match(t)
    if m:
        coef = m.group(1)
        num = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        den = float(m.group(2)) if m.group(2) else 1.0
        return num * math.pi / den
    return float(t)


def transport_from_id(spec: str) -> TransportMap:
    name, _, arg = spec.strip().partition(":")
    if name == "exp-neg":
        return map_exp_negative()
    if name == "reciprocal":
        return map_reciprocal()
    if name == "rot":
        return map_rotation(parse_angle(arg))
    if name == "affine":
        c, _, d = arg.partition(",")
        return map_affine(complex(c), complex(d) if d else 0j)
    raise UnknownTransport(f"unknown transport id {spec!r}")


def chain_from_ids(specs: Sequence[str] | str) -> TransportChain:
    if isinstance(specs, str):
        specs = [s for s in specs.split("|") if s.strip()]
    return TransportChain([transport_from_id(s) for s in specs])


TRANSPORT_CATALOG = {
    "exp-neg": "w -> exp(-w), half-plane to disc",
    "reciprocal": "w -> 1/w, disc exterior to disc",
    "rot:<angle>": "rotation about 0",
    "affine:<c>,<d>": "w -> c w + d",
}


# ---------------------------------------------------------------- transport


def neighbourhood_samples(J: BoundarySet, delta: float = DERIV_FLOOR_DELTA, count: int = 1000):
    per = 5
    m = max(1, count // per)
    lengths = [p.length for p in J.pieces]
    total = sum(lengths)
    base = []
    for p, L in zip(J.pieces, lengths):
        k = max(1, int(round(m * L / total)))
        base.append(p.point((np.arange(k) + 0.5) / k))
    base = np.concatenate(base)
    offsets = np.concatenate([[0.0], delta * np.exp(1j * TWO_PI * np.arange(per - 1) / (per - 1))])
    return (base[:, None] + offsets[None, :]).ravel()


def deriv_floor(phi, J: BoundarySet, delta: float = DERIV_FLOOR_DELTA, count: int = 1000) -> float:
    """``0.9 * min |phi'|`` over about ``count`` points of the delta-neighbourhood of J."""
    chain = as_chain(phi)
    pts = neighbourhood_samples(J, delta, count)
    return DERIV_FLOOR_SAFETY * float(np.min(np.abs(chain.derivative(pts))))


class Transported:
    """``w -> f(phi(w))``; carries the source tolerance and, if known, the derivative floor."""

    def __init__(self, f, phi, J: BoundarySet | None = None):
        self.source = f
        self.chain = as_chain(phi)
        self.tolerance = float(getattr(f, "tolerance", 0.0))
        self.deriv_floor = deriv_floor(self.chain, J) if J is not None else None

    def __call__(self, w):
        return self.source(self.chain.forward(w))

    @property
    def name(self) -> str:
        return f"{getattr(self.source, 'name', 'f')} o [{self.chain.name}]"

    def derivative(self, w):
        fd = getattr(self.source, "derivative", None)
        if fd is None:
            raise AttributeError("source function has no derivative")
        return fd(self.chain.forward(w)) * self.chain.derivative(w)


def transport_function(f, phi, J: BoundarySet | None = None) -> Transported:
    """Pull ``f`` back along ``phi``; with ``J`` the derivative floor on J is recorded."""
    return Transported(f, phi, J)


def _approach(piece, t0: float, n: int, h0: float):
    # parameters approaching t0 from the side with more room
    if piece.closed:
        sign = 1.0
    else:
        sign = 1.0 if (1.0 - t0) >= t0 else -1.0
        h0 = min(h0, 0.5 * max(t0, 1.0 - t0))
    ts = t0 + sign * h0 * 2.0 ** -np.arange(n)
    return np.mod(ts, 1.0) if piece.closed else ts


@dataclass
class ChainRuleReport:
    z0: complex
    target: float  # 1/|phi'(z0)| in the source-to-target convention
    inverse_ratios: np.ndarray  # |z_n - z0| / |phi(z_n) - phi(z0)|
    quotient_factor_error: float | None
    passed: bool

    @property
    def ratios(self) -> np.ndarray:
        return 1.0 / self.inverse_ratios

    @property
    def relative_error(self) -> float:
        return abs(self.inverse_ratios[-1] / self.target - 1.0)


def verify_chain_rule(f, phi, domain: DomainSpec, z0: JSample, sequence_length: int = 20,
                      h0: float = 0.05, rtol: float = 0.01) -> ChainRuleReport:
    """Check ``|z_n - z0| / |phi(z_n) - phi(z0)| -> 1/|phi'(z0)|`` along J.

    When ``f`` is given, the quotient identity for ``h = f o phi`` is also
    checked: ``q_h(z_n) = q_f(phi(z_n)) * |phi(z_n) - phi(z0)| / |z_n - z0|``.
    """
    chain = as_chain(phi)
    piece = domain.boundary_J.pieces[z0.piece_index]
    ts = _approach(piece, z0.parameter, sequence_length, h0)
    zn = piece.point(ts)
    c0 = complex(z0.point)
    p0 = complex(chain.forward(np.array([c0]))[0])
    pn = chain.forward(zn)
    inv = np.abs(zn - c0) / np.abs(pn - p0)
    target = 1.0 / abs(complex(chain.derivative(np.array([c0]))[0]))
    factor_err = None
    if f is not None:
        h = Transported(f, chain)
        qh = np.abs(h(zn) - h(np.array([c0]))[0]) / np.abs(zn - c0)
        fn = f(pn)
        f0 = f(np.array([p0]))[0]
        qf = np.abs(fn - f0) / np.abs(pn - p0)
        ok = qf > 0
        factor_err = float(np.max(np.abs(qh[ok] / (qf[ok] / inv[ok]) - 1.0))) if ok.any() else 0.0
    passed = abs(inv[-1] / target - 1.0) <= rtol
    return ChainRuleReport(c0, target, inv, factor_err, bool(passed))


def round_trip_error(phi: TransportMap, n: int = 1000, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    w = phi.probe(n, rng)
    back = phi.inverse(phi.forward(w), near=w)
    return float(np.max(np.abs(back - w)))


# ---------------------------------------------------------------- per-piece chains


def _inside_left(domain: DomainSpec, piece, eps: float = 1e-6) -> bool:
    # probe off the midpoint too: a piece may touch another boundary part there
    for t in (0.5, 0.3, 0.7, 0.1, 0.9):
        mid = complex(piece.point(t))
        tan = complex(piece.tangent(t))
        n = 1j * tan / abs(tan)
        left = bool(domain.membership(np.array([mid + eps * n]))[0])
        right = bool(domain.membership(np.array([mid - eps * n]))[0])
        if left != right:
            return left
    raise TransportError(f"cannot orient piece {piece.describe()} of {domain.id}")


def piece_chain(domain: DomainSpec, piece_index: int) -> TransportChain:
    """Chain carrying a neighbourhood of one J piece into the closed unit disc.

    The piece lands on the unit circle and the domain inside the disc, so
    ``seed o chain`` inherits the seed's boundary roughness along that piece.
    Segments go through an affine map onto the imaginary axis followed by
    ``exp(-w)``; arcs through an affine normalization, followed by ``1/w``
    when the domain lies outside the circle.
    """
    piece = domain.boundary_J.pieces[piece_index]
    if isinstance(piece, Segment):
        d = (piece.end - piece.start) / piece.length
        n = 1j * d if _inside_left(domain, piece) else -1j * d
        s = min(1.0, math.pi / piece.length)
        c = n.conjugate() * s
        return TransportChain([map_affine(c, -piece.start * c), map_exp_negative()])
    if isinstance(piece, Arc):
        c = 1.0 / piece.radius
        affine = map_affine(c, -piece.center * c)
        # the tangent of an arc turns left, so "inside on the left" means inside the circle
        inner = _inside_left(domain, piece)
        return TransportChain([affine] if inner else [affine, map_reciprocal()])
    raise TransportError(f"unsupported piece type {type(piece).__name__}")
