"""Complexified Weierstrass lacunary series ``g(z) = sum_n a**n z**(b**n)``.

The series converges absolutely and uniformly on the closed unit disc, and
``Re g(e^{i theta})`` is the classical Weierstrass function
``sum_n a**n cos(b**n theta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np

from .errors import NdposError

#: slack on ``|z| <= 1`` for points produced by boundary samplers
EPS_GEOM = 1e-9
#: default distance from the unit circle for interior derivatives
DELTA_INT = 1e-3
DEFAULT_TOLERANCE = 1e-12
#: hard cap on the number of terms (a**N underflows well before this)
MAX_TERMS = 2000

CLASSICAL_PRODUCT_BOUND = 1.0 + 1.5 * math.pi


class ParameterError(NdposError):
    """Base class for rejected ``(a, b)`` pairs."""

    tag = "InvalidParams"


class AmplitudeOutOfRange(ParameterError):
    tag = "AmplitudeOutOfRange"


class BaseNotOddInteger(ParameterError):
    tag = "BaseNotOddInteger"


class ProductTooSmall(ParameterError):
    tag = "ProductTooSmall"


class PointOutsideClosedDisc(NdposError):
    tag = "PointOutsideClosedDisc"


class TooCloseToBoundary(NdposError):
    tag = "TooCloseToBoundary"


@dataclass(frozen=True)
class WeierstrassParams:
    """Amplitude ratio ``a`` and frequency base ``b``.

    ``conforming`` is False only for pairs accepted in permissive mode,
    i.e. outside the classical constraint ``a*b > 1 + 3*pi/2``.
    """

    a: float
    b: int
    conforming: bool = True

    @property
    def ab(self) -> float:
        return self.a * self.b


def validate_params(a, b, permissive=False) -> WeierstrassParams:
    """Check ``0 < a < 1``, ``b`` odd with ``b >= 3`` and ``a*b > 1 + 3*pi/2``.

    With ``permissive=True`` the product constraint is relaxed to
    ``a*b >= 1`` and the result is flagged non-conforming.

    Raises
    ------
    AmplitudeOutOfRange, BaseNotOddInteger, ProductTooSmall
    """
    a = float(a)
    if not (0.0 < a < 1.0) or not math.isfinite(a):
        raise AmplitudeOutOfRange(f"a must lie in (0, 1), got {a!r}")
    if isinstance(b, bool) or not float(b).is_integer():
        raise BaseNotOddInteger(f"b must be an odd integer >= 3, got {b!r}")
    b = int(b)
    if b < 3 or b % 2 == 0:
        raise BaseNotOddInteger(f"b must be an odd integer >= 3, got {b!r}")
    ab = a * b
    if ab > CLASSICAL_PRODUCT_BOUND:
        return WeierstrassParams(a, b, True)
    if permissive and ab >= 1.0:
        return WeierstrassParams(a, b, False)
    raise ProductTooSmall(
        f"a*b = {ab:.6g} must exceed 1 + 3*pi/2 = {CLASSICAL_PRODUCT_BOUND:.6g}"
    )


def tail_bound(params: WeierstrassParams, N: int) -> float:
    """Upper bound ``a**(N+1) / (1-a)`` on the error of the N-th partial sum."""
    if N < 0:
        raise ValueError("N must be >= 0")
    a = params.a
    return a ** (N + 1) / (1.0 - a)


def truncation_level(params: WeierstrassParams, tolerance: float) -> int:
    """Smallest ``N`` with ``tail_bound(params, N) <= tolerance``."""
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    a = params.a
    # start from the closed form, then correct for rounding in the log
    N = max(0, math.ceil(math.log(tolerance * (1.0 - a)) / math.log(a)) - 1)
    while N > 0 and tail_bound(params, N - 1) <= tolerance:
        N -= 1
    while tail_bound(params, N) > tolerance:
        N += 1
    if N >= MAX_TERMS:
        raise ValueError(f"tolerance {tolerance} needs more than {MAX_TERMS} terms")
    return N


def _ipow(z: np.ndarray, e: int) -> np.ndarray:
    # binary exponentiation by repeated multiplication (no exp/log)
    result = np.ones_like(z)
    base = z.copy()
    while e:
        if e & 1:
            result = result * base
        e >>= 1
        if e:
            base = base * base
    return result


def _as_complex_array(z):
    arr = np.asarray(z, dtype=complex)
    return arr, arr.ndim == 0


def partial_sums(params: WeierstrassParams, z, N: int) -> np.ndarray:
    """Partial sums ``S_0, ..., S_N`` stacked along a new leading axis."""
    arr, _ = _as_complex_array(z)
    arr = np.atleast_1d(arr)
    if np.any(np.abs(arr) > 1.0 + EPS_GEOM):
        raise PointOutsideClosedDisc("partial sums are only defined on |z| <= 1")
    out = np.empty((N + 1,) + arr.shape, dtype=complex)
    zn = arr.copy()
    total = np.zeros_like(arr)
    coeff = 1.0
    for n in range(N + 1):
        if n > 0:
            zn = _ipow(zn, params.b)
            coeff *= params.a
        zn = _clamp_unit(zn)
        total = total + coeff * zn
        out[n] = total
    return out


def _clamp_unit(zn: np.ndarray) -> np.ndarray:
    # rounding can leave boundary points at |z| = 1 + ulp; |z|**(b**n) would
    # then blow up, so project such points back onto the circle
    mod = np.abs(zn)
    over = mod > 1.0
    if np.any(over):
        zn = zn.copy()
        zn[over] = zn[over] / mod[over]
    return zn


@dataclass(frozen=True)
class LacunarySeries:
    """The lacunary series with certified absolute truncation error on ``|z| <= 1``."""

    params: WeierstrassParams
    default_tolerance: float = DEFAULT_TOLERANCE
    delta_int: float = DELTA_INT
    _N: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_N", truncation_level(self.params, self.default_tolerance))

    @classmethod
    def from_ab(cls, a, b, **kwargs) -> "LacunarySeries":
        permissive = kwargs.pop("permissive", False)
        return cls(validate_params(a, b, permissive=permissive), **kwargs)

    @property
    def truncation(self) -> int:
        return self._N

    @property
    def tolerance(self) -> float:
        return self.default_tolerance

    def eval(self, z):
        """Evaluate the series at ``z`` (scalar or array) with ``|z| <= 1``."""
        arr, scalar = _as_complex_array(z)
        flat = np.atleast_1d(arr).ravel()
        if np.any(np.abs(flat) > 1.0 + EPS_GEOM):
            raise PointOutsideClosedDisc("the series diverges outside the closed unit disc")
        a, b = self.params.a, self.params.b
        total = np.zeros_like(flat)
        zn = _clamp_unit(flat.copy())
        coeff = 1.0
        for n in range(self._N + 1):
            if n > 0:
                zn = _clamp_unit(_ipow(zn, b))
                coeff *= a
            total += coeff * zn
        total = total.reshape(np.shape(arr))
        return complex(total) if scalar else total

    __call__ = eval

    @property
    def name(self) -> str:
        return f"weierstrass({self.params.a:g},{self.params.b})"

    def eval_angle(self, theta):
        """Evaluate ``g(e^{i theta})`` for exact real ``theta``.

        Unlike :meth:`eval`, the phases ``b**n * theta`` are reduced modulo
        ``2*pi`` in exact fixed-point arithmetic, so the result is accurate to
        the truncation tolerance as a function of the double ``theta``.
        """
        th = np.asarray(theta, dtype=float)
        out = np.array([
            _boundary_value(self.params.a, self.params.b, self._N, float(x))
            for x in th.ravel()
        ], dtype=complex).reshape(th.shape)
        return complex(out) if out.ndim == 0 else out

    def derivative_tail_bound(self, r: float, N: int) -> float:
        """Bound on ``sum_{n>N} (ab)**n r**(b**n - 1)`` for ``0 <= r < 1``."""
        a, b = self.params.a, self.params.b
        if r == 0.0:
            return 0.0
        # terms decay super-geometrically; sum until they are negligible
        total = 0.0
        log_r = math.log(r)
        for n in range(N + 1, MAX_TERMS):
            log_term = n * math.log(a * b) + (b**n - 1) * log_r
            if log_term < -745.0:
                break
            total += math.exp(log_term)
        return total

    def _derivative_truncation(self, r: float) -> int:
        N = 0
        while N < 200 and self.derivative_tail_bound(r, N) > self.default_tolerance:
            N += 1
        return N

    def eval_interior_derivative(self, z):
        """Term-wise derivative ``sum_n (ab)**n z**(b**n - 1)`` for ``|z| <= 1 - delta_int``.

        Raises
        ------
        TooCloseToBoundary
            If any point lies within ``delta_int`` of the unit circle.
        """
        arr, scalar = _as_complex_array(z)
        flat = np.atleast_1d(arr).ravel()
        radius = float(np.max(np.abs(flat))) if flat.size else 0.0
        if radius > 1.0 - self.delta_int:
            raise TooCloseToBoundary(
                f"|z| = {radius:.6g} exceeds 1 - delta_int = {1.0 - self.delta_int:.6g}"
            )
        a, b = self.params.a, self.params.b
        N = self._derivative_truncation(radius)
        # w_n = z**(b**n - 1) via w_{n+1} = w_n**b * z**(b-1); no division at z = 0
        step = _ipow(flat, b - 1)
        w = np.ones_like(flat)
        total = np.zeros_like(flat)
        coeff = 1.0
        for n in range(N + 1):
            if n > 0:
                w = _ipow(w, b) * step
                coeff *= a * b
            total += coeff * w
        total = total.reshape(np.shape(arr))
        return complex(total) if scalar else total

    derivative = eval_interior_derivative

    def derivative_error_bound(self, z) -> float:
        """Truncation error bound of :meth:`eval_interior_derivative` at ``z``."""
        r = float(np.max(np.abs(np.atleast_1d(np.asarray(z, dtype=complex)))))
        return self.derivative_tail_bound(r, self._derivative_truncation(r))


@lru_cache(maxsize=8)
def _inv_two_pi_fixed(bits: int) -> int:
    with mpmath.workprec(bits + 64):
        return int(mpmath.floor(mpmath.ldexp(1 / (2 * mpmath.pi), bits)))


def _boundary_value(a: float, b: int, N: int, theta: float) -> complex:
    num, den = theta.as_integer_ratio()  # den is a power of two
    frac_bits = 64 + (N + 1) * b.bit_length() + max(0, abs(num).bit_length() - den.bit_length())
    bits = frac_bits + den.bit_length()
    mask = (1 << frac_bits) - 1
    # turns = theta / (2 pi) in fixed point with frac_bits fractional bits
    turns = (num * _inv_two_pi_fixed(bits)) // (den << (bits - frac_bits))
    turns &= mask
    total = 0j
    coeff = 1.0
    for n in range(N + 1):
        phase = 2.0 * math.pi * ((turns >> (frac_bits - 60)) * 2.0**-60)
        total += coeff * complex(math.cos(phase), math.sin(phase))
        turns = (turns * b) & mask
        coeff *= a
    return total


def weierstrass_u(params: WeierstrassParams, theta, N: int | None = None):
    """Classical real Weierstrass function ``sum_n a**n cos(b**n theta)``.

    The phase ``b**n theta`` is formed directly, so this is only accurate
    while ``b**N * |theta|`` stays well inside double precision.
    """
    theta = np.asarray(theta, dtype=float)
    if N is None:
        N = truncation_level(params, DEFAULT_TOLERANCE)
    total = np.zeros_like(theta)
    for n in range(N + 1):
        total += params.a**n * np.cos(float(params.b) ** n * theta)
    return total
