"""Special functions used by the solution catalog.

Bessel functions come from scipy.special.  The confluent hypergeometric
series, Whittaker M and the adaptive Simpson engine are implemented here
because the catalog needs their exact truncation and branch behaviour.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sp

from .core import DomainError, NumericError, RadialNLSError, check_finite


class SeriesError(NumericError):
    kind = "series"


class QuadratureError(NumericError):
    kind = "quadrature"


class RangeError(NumericError):
    kind = "range"


class BesselKind(str, enum.Enum):
    J = "J"
    Y = "Y"
    I = "I"  # noqa: E741
    K = "K"


_BESSEL = {
    BesselKind.J: _sp.jv,
    BesselKind.Y: _sp.yv,
    BesselKind.I: _sp.iv,
    BesselKind.K: _sp.kv,
}


def bessel(kind: BesselKind | str, order: float, x: float) -> float:
    """J, Y, I or K of real order >= 0 at x > 0."""
    kind = BesselKind(kind)
    if not x > 0:
        raise DomainError(f"bessel {kind.value}: x must be > 0, got {x}")
    if order < 0:
        raise DomainError("bessel: negative order must be reflected by the caller")
    v = float(_BESSEL[kind](order, x))
    if not math.isfinite(v):
        raise RangeError(f"bessel {kind.value}_{order}({x}) out of range")
    return v


def bessel_derivative(kind: BesselKind | str, order: float, x: float) -> float:
    """d/dx via the upward recurrences (no negative orders needed)."""
    kind = BesselKind(kind)
    v = order / x * bessel(kind, order, x)
    nxt = bessel(kind, order + 1, x)
    return v + nxt if kind is BesselKind.I else v - nxt


# confluent hypergeometric ---------------------------------------------------

MAX_TERMS = 700
SERIES_RTOL = 1e-17
MAX_ABS_Z = 60.0


def _nonpos_int(x: complex) -> int | None:
    if x.imag == 0 and x.real <= 0 and float(x.real).is_integer():
        return int(x.real)
    return None


def _check_pole(a: complex, b: complex) -> None:
    # A pole in b is harmless when the numerator Pochhammer hits zero first,
    # i.e. a is a non-positive integer with a >= b: the series is a polynomial.
    nb = _nonpos_int(b)
    if nb is None:
        return
    na = _nonpos_int(a)
    if na is not None and na >= nb:
        return
    raise DomainError(f"hyp1f1: b = {b} is a pole")


def hyp1f1(a: complex, b: complex, z: complex) -> complex:
    """Kummer's 1F1(a; b; z) by its power series with compensated summation."""
    a, b, z = complex(a), complex(b), complex(z)
    _check_pole(a, b)
    if abs(z) > MAX_ABS_Z:
        raise SeriesError(f"hyp1f1: |z| = {abs(z):.3g} beyond series regime")
    total = 1.0 + 0j
    comp = 0j
    term = 1.0 + 0j
    for j in range(MAX_TERMS):
        if a + j == 0:
            return check_finite(total, "hyp1f1")
        term *= (a + j) / ((b + j) * (j + 1)) * z
        # Kahan step
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if abs(term) < SERIES_RTOL * abs(total):
            return check_finite(total, "hyp1f1")
    raise SeriesError(f"hyp1f1({a}, {b}, {z}) did not converge in {MAX_TERMS} terms")


def hyp1f1_array(a: complex, b: complex, z) -> np.ndarray:
    """Vectorised hyp1f1 over an array of z, same stopping rule."""
    a, b = complex(a), complex(b)
    _check_pole(a, b)
    z = np.asarray(z, dtype=complex)
    if z.size and np.max(np.abs(z)) > MAX_ABS_Z:
        raise SeriesError("hyp1f1: argument beyond series regime")
    total = np.ones_like(z)
    comp = np.zeros_like(z)
    term = np.ones_like(z)
    for j in range(MAX_TERMS):
        if a + j == 0:
            return total
        term = term * ((a + j) / ((b + j) * (j + 1))) * z
        y = term - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if np.all(np.abs(term) < SERIES_RTOL * np.abs(total)):
            return total
    raise SeriesError(f"hyp1f1({a}, {b}, ...) did not converge in {MAX_TERMS} terms")


@dataclass(frozen=True)
class WhittakerParams:
    kappa: complex
    mu: complex

    def __post_init__(self):
        object.__setattr__(self, "kappa", complex(self.kappa))
        object.__setattr__(self, "mu", complex(self.mu))
        try:
            _check_pole(self.a, self.b)
        except DomainError:
            raise DomainError(
                f"Whittaker M_{{{self.kappa},{self.mu}}}: 1+2mu is a pole "
                "and the series does not terminate")

    @property
    def a(self) -> complex:
        return self.mu - self.kappa + 0.5

    @property
    def b(self) -> complex:
        return 1 + 2 * self.mu


def whittaker_m(wp: WhittakerParams, z: complex) -> complex:
    """M_{kappa,mu}(z) with the principal branch of z^(mu+1/2)."""
    z = complex(z)
    if z == 0:
        raise DomainError("whittaker_m: z = 0")
    f = hyp1f1(wp.a, wp.b, z)
    return check_finite(cmath.exp(-z / 2 + (wp.mu + 0.5) * cmath.log(z)) * f,
                        "whittaker_m")


def whittaker_m_array(wp: WhittakerParams, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("whittaker_m: z = 0")
    out = np.exp(-z / 2 + (wp.mu + 0.5) * np.log(z)) * hyp1f1_array(wp.a, wp.b, z)
    if not np.all(np.isfinite(out)):
        raise NumericError("whittaker_m: non-finite value")
    return out


# adaptive Simpson -----------------------------------------------------------

MAX_DEPTH = 40


def adaptive_simpson(f: Callable, a: float, b: float, tol: float,
                     vectorized: bool = False, max_depth: int = MAX_DEPTH) -> complex:
    """Adaptive Simpson with Richardson correction, processed level by level.

    With ``vectorized=True`` f receives a numpy array of nodes and must
    return an array; all intervals of one level are evaluated in one call.
    Returns a complex number (real integrands give zero imaginary part).
    """
    if not tol > 0:
        raise RadialNLSError("tolerance must be positive", kind="parameter")
    if a == b:
        return 0j
    if not vectorized:
        scalar = f

        def f(x):
            return np.array([complex(scalar(float(v))) for v in np.ravel(x)])

    def ev(x):
        y = np.asarray(f(np.asarray(x, dtype=float)), dtype=complex)
        if not np.all(np.isfinite(y)):
            raise NumericError("adaptive_simpson: non-finite integrand")
        return y

    m = 0.5 * (a + b)
    fa, fm, fb = ev([a, m, b])
    lo = np.array([a])
    hi = np.array([b])
    flo, fmid, fhi = fa[None], fm[None], fb[None]
    whole = (b - a) / 6 * (flo + 4 * fmid + fhi)
    eps = np.array([tol])
    total = 0j
    for _ in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        q1 = 0.5 * (lo + mid)
        q3 = 0.5 * (mid + hi)
        vals = ev(np.concatenate([q1, q3]))
        f1, f3 = vals[: len(lo)], vals[len(lo):]
        left = (mid - lo) / 6 * (flo + 4 * f1 + fmid)
        right = (hi - mid) / 6 * (fmid + 4 * f3 + fhi)
        delta = left + right - whole
        done = np.abs(delta) <= 15 * eps
        total += np.sum((left + right + delta / 15)[done])
        keep = ~done
        if not np.any(keep):
            return complex(total)
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, f1, fmid, f3, fhi = flo[keep], f1[keep], fmid[keep], f3[keep], fhi[keep]
        eps = eps[keep] / 2
        lo = np.concatenate([lo, mid])
        hi = np.concatenate([mid, hi])
        flo, fhi, fmid = (np.concatenate([flo, fmid]), np.concatenate([fmid, fhi]),
                          np.concatenate([f1, f3]))
        whole = np.concatenate([left[keep], right[keep]])
        eps = np.concatenate([eps, eps])
    raise QuadratureError(f"adaptive_simpson: depth {max_depth} exceeded on [{a}, {b}]")


def integrate_whittaker(wp: WhittakerParams, arg_map: Callable, a: float, b: float,
                        tol: float = 1e-10) -> complex:
    """Integral over [a, b] (a, b > 0) of xi -> M(arg_map(xi))."""
    if not (a > 0 and b > 0):
        raise DomainError("integrate_whittaker: limits must be positive")
    if a == b:
        return 0j

    def integrand(xi):
        return whittaker_m_array(wp, arg_map(xi))

    return adaptive_simpson(integrand, a, b, tol, vectorized=True)


class WhittakerAntiderivative:
    """xi -> integral from ``lower`` to xi of M(arg_map(x)) dx, memoised.

    The path is cut at a fixed lattice lower + j*step; lattice segments are
    integrated once and reused, so neighbouring evaluations (finite-difference
    stencils) only pay for the short final piece.
    """

    def __init__(self, wp: WhittakerParams, arg_map: Callable, lower: float,
                 step: float = 1 / 64, tol: float = 1e-13):
        if not lower > 0:
            raise DomainError("WhittakerAntiderivative: lower limit must be > 0")
        self.wp, self.arg_map, self.lower = wp, arg_map, float(lower)
        self.step, self.tol = step, tol
        self._nodes = {0: 0j}

    def _node(self, j: int) -> complex:
        if j in self._nodes:
            return self._nodes[j]
        d = 1 if j > 0 else -1
        i = j
        while i not in self._nodes:
            i -= d
        acc = self._nodes[i]
        while i != j:
            a = self.lower + i * self.step
            b = self.lower + (i + d) * self.step
            if not (a > 0 and b > 0):
                raise DomainError("WhittakerAntiderivative: path reaches xi <= 0")
            acc += integrate_whittaker(self.wp, self.arg_map, a, b, self.tol)
            i += d
            self._nodes[i] = acc
        return acc

    def __call__(self, xi: float) -> complex:
        if not xi > 0:
            raise DomainError("WhittakerAntiderivative: xi must be > 0")
        j = math.floor((xi - self.lower) / self.step)
        if j < 0:
            j += 1  # stay between the anchor and xi on the left side too
        base = self.lower + j * self.step
        head = self._node(j)
        if base == xi:
            return head
        if not base > 0:
            raise DomainError("WhittakerAntiderivative: path reaches xi <= 0")
        return head + integrate_whittaker(self.wp, self.arg_map, base, xi, self.tol)
