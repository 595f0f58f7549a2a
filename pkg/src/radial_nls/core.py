"""Shared numeric types, PDE parameters, grids and finite differences.

Every other module speaks in terms of :class:`Parameters` for the equation

    i u_t = u_rr + (n-1) r^{-1} u_r + k |u|^p u

and :class:`Solution` for a complex field u(t, r) together with the
predicate describing where the closed form is valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np


class RadialNLSError(Exception):
    """Base error. ``kind`` is a short machine readable tag."""

    kind = "error"

    def __init__(self, message: str, kind: str | None = None):
        super().__init__(message)
        if kind is not None:
            self.kind = kind


class ParameterError(RadialNLSError):
    kind = "parameter"


class DomainError(RadialNLSError):
    kind = "domain"


class NumericError(RadialNLSError):
    kind = "numeric"


class ConstraintError(RadialNLSError):
    kind = "constraint"


def _finite_real(x, name: str) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {x!r}")
    if not math.isfinite(v):
        raise ParameterError(f"{name} must be finite, got {v}")
    return v


def check_finite(z: complex, what: str = "value") -> complex:
    """Reject NaN/inf at a module boundary."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NumericError(f"non-finite {what}: {z}")
    return z


@dataclass(frozen=True)
class Parameters:
    """Equation parameters; build through :func:`validate_params`."""

    n: float
    p: float
    k: float

    def __post_init__(self):
        if self.p == 0:
            raise ParameterError("invalid power: p = 0 is excluded")
        if self.k == 0:
            raise ParameterError("invalid coupling: k = 0 is excluded")

    @property
    def m(self) -> float:
        """Modulation parameter of the planar form, m = 2 - n."""
        return 2.0 - self.n

    @property
    def is_pseudo_conformal(self) -> bool:
        return self.p * self.n == 4.0 or _close_rational(self.p * self.n, 4.0)


def _close_rational(a: float, b: float) -> bool:
    # p = 4/3, n = 3 gives p*n = 4.000000000000000x in floating point; the
    # stored reals come from decimal strings so a few ulps is "exact".
    return abs(a - b) <= 8 * np.finfo(float).eps * max(1.0, abs(b))


def validate_params(n, p, k) -> Parameters:
    n = _finite_real(n, "n")
    p = _finite_real(p, "p")
    k = _finite_real(k, "k")
    return Parameters(n, p, k)


def parse_real(text: str) -> float:
    """Parse '4/3', '-1', '0.25' into a float."""
    text = str(text).strip()
    if "/" in text:
        a, b = text.split("/", 1)
        return float(a) / float(b)
    return float(text)


@dataclass(frozen=True)
class SpacetimePoint:
    t: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.t) and math.isfinite(self.r)):
            raise DomainError("spacetime point must be finite")
        if self.r <= 0:
            raise DomainError(f"r must be positive, got {self.r}")


@dataclass(frozen=True)
class Grid:
    t_min: float
    t_max: float
    nt: int
    r_min: float
    r_max: float
    nr: int

    def __post_init__(self):
        if self.nt < 1 or self.nr < 1:
            raise ParameterError("grid sizes must be >= 1")
        if not (self.t_min < self.t_max or self.nt == 1):
            raise ParameterError("need t_min < t_max unless nt = 1")
        if not (0 < self.r_min < self.r_max or (self.nr == 1 and self.r_min > 0)):
            raise ParameterError("need 0 < r_min < r_max")

    @classmethod
    def parse(cls, spec: str) -> "Grid":
        """'t0,t1,nt,r0,r1,nr'"""
        parts = [s.strip() for s in spec.split(",")]
        if len(parts) != 6:
            raise ParameterError("grid spec is t0,t1,nt,r0,r1,nr")
        t0, t1, r0, r1 = (parse_real(parts[i]) for i in (0, 1, 3, 4))
        return cls(t0, t1, int(parts[2]), r0, r1, int(parts[5]))

    def times(self) -> np.ndarray:
        if self.nt == 1:
            return np.array([self.t_min])
        return np.linspace(self.t_min, self.t_max, self.nt)

    def radii(self) -> np.ndarray:
        if self.nr == 1:
            return np.array([self.r_min])
        return np.linspace(self.r_min, self.r_max, self.nr)

    def __iter__(self) -> Iterator[SpacetimePoint]:
        for t in self.times():
            for r in self.radii():
                yield SpacetimePoint(float(t), float(r))


def _always(t: float, r: float) -> bool:
    return r > 0


@dataclass(frozen=True)
class Solution:
    """A complex field u(t, r) with its validity predicate."""

    eval: Callable[[float, float], complex]
    domain: Callable[[float, float], bool] = _always
    label: str = "u"
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, t: float, r: float) -> complex:
        if not self.contains(t, r):
            raise DomainError(f"{self.label}: ({t}, {r}) outside domain")
        return check_finite(self.eval(t, r), f"{self.label}({t}, {r})")

    def contains(self, t: float, r: float) -> bool:
        if not (r > 0 and math.isfinite(t) and math.isfinite(r)):
            return False
        try:
            return bool(self.domain(t, r))
        except (ValueError, ZeroDivisionError, OverflowError):
            return False


# finite differences --------------------------------------------------------

T_STEP = 2.0 ** -13  # ~1.2e-4
R_STEP = 2.0 ** -9  # ~2e-3 per unit radius, shared by u_r and u_rr
R_FLOOR = 0.5


def _pow2(h: float) -> float:
    # a power of two keeps x +- h exact for most coordinates
    return 2.0 ** math.floor(math.log2(h))


def default_step(which: str, pt: SpacetimePoint) -> float:
    if which == "t":
        return _pow2(T_STEP * max(1.0, abs(pt.t)))
    # proportional to r away from the origin so power-law profiles keep a
    # fixed relative resolution (and a scaled orbit gets a scaled stencil)
    h = R_STEP * max(R_FLOOR, pt.r)
    h = min(h, pt.r / 8.0)
    return _pow2(h)


def _stencil(s: Solution, pt: SpacetimePoint, which: str, h: float) -> dict:
    if which == "t":
        pts = {o: (pt.t + o * h, pt.r) for o in (-1.0, -0.5, 0.0, 0.5, 1.0)}
    else:
        pts = {o: (pt.t, pt.r + o * h) for o in (-1.0, -0.5, 0.0, 0.5, 1.0)}
    out = {}
    for o, (t, r) in pts.items():
        if not s.contains(t, r):
            raise DomainError(f"{s.label}: stencil point ({t}, {r}) leaves the domain")
        out[o] = check_finite(s.eval(t, r), f"{s.label}({t}, {r})")
    return out


def _first(v: dict, h: float) -> complex:
    d1 = (v[1.0] - v[-1.0]) / (2 * h)
    d2 = (v[0.5] - v[-0.5]) / h
    return (4 * d2 - d1) / 3


def _second(v: dict, h: float) -> complex:
    d1 = (v[1.0] - 2 * v[0.0] + v[-1.0]) / (h * h)
    d2 = (v[0.5] - 2 * v[0.0] + v[-0.5]) / (0.25 * h * h)
    return (4 * d2 - d1) / 3


def partial_derivative(s: Solution, pt: SpacetimePoint, which: str,
                       h0: float | None = None) -> complex:
    """Central difference with one Richardson step (h0 and h0/2).

    ``which`` is 't', 'r' or 'rr'.  Error is O(h0^4) for smooth fields.
    """
    if which not in ("t", "r", "rr"):
        raise ParameterError(f"unknown derivative {which!r}")
    h = default_step(which, pt) if h0 is None else float(h0)
    if not h > 0:
        raise ParameterError("step must be positive")
    v = _stencil(s, pt, "t" if which == "t" else "r", h)
    if which == "rr":
        return _second(v, h)
    return _first(v, h)


@dataclass(frozen=True)
class Jet:
    """u and its first/second derivatives at a point."""

    u: complex
    u_t: complex
    u_r: complex
    u_rr: complex


def jet(s: Solution, pt: SpacetimePoint, h_t: float | None = None,
        h_r: float | None = None) -> Jet:
    """All derivatives needed by the PDE, sharing the r stencil."""
    ht = default_step("t", pt) if h_t is None else h_t
    hr = default_step("r", pt) if h_r is None else h_r
    vt = _stencil(s, pt, "t", ht)
    vr = _stencil(s, pt, "r", hr)
    return Jet(vr[0.0], _first(vt, ht), _first(vr, hr), _second(vr, hr))


def origin_limit(f: Callable[[float], complex], h: float = 1e-3,
                 rtol: float = 1e-3) -> complex:
    """Value at r = 0+ from samples at 4h, 2h, h, extrapolated linearly.

    Two linear extrapolations (from {h, 2h} and {2h, 4h}) must agree,
    otherwise the field is treated as singular at the origin.
    """
    try:
        f1, f2, f4 = (check_finite(f(x)) for x in (h, 2 * h, 4 * h))
    except (ZeroDivisionError, OverflowError, ValueError, DomainError, NumericError) as e:
        raise NumericError(f"singular_at_origin: {e}", kind="singular_at_origin")
    a = 2 * f1 - f2
    b = 2 * f2 - f4
    if abs(a - b) > rtol * (1.0 + abs(a)):
        raise NumericError("singular_at_origin: extrapolations disagree",
                           kind="singular_at_origin")
    return a
