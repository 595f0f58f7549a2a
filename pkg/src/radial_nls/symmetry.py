"""Radial point symmetries: generators, brackets, finite actions, invariants.

Generator coefficients are polynomials in (t, r) so that brackets are
computed from exact partial derivatives.  Every generator acts on u
multiplicatively, eta = h(t, r) u.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

from .core import (ConstraintError, ParameterError, Parameters, Solution,
                   SpacetimePoint, partial_derivative)


class NotPseudoConformal(ConstraintError):
    kind = "not_pseudo_conformal"


def require_pseudo_conformal(params: Parameters, what: str) -> None:
    if not params.is_pseudo_conformal:
        raise NotPseudoConformal(
            f"{what} requires p*n = 4, got p={params.p}, n={params.n}")


class Poly:
    """Polynomial in (t, r) with complex coefficients, {(i, j): c} for c t^i r^j."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {k: complex(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({(0, 0): c})

    def __call__(self, t: float, r: float) -> complex:
        return sum((c * t ** i * r ** j for (i, j), c in self.terms.items()), 0j)

    def __add__(self, other: "Poly") -> "Poly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly({k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (i1, j1), a in self.terms.items():
            for (i2, j2), b in other.terms.items():
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, 0) + a * b
        return Poly(out)

    __rmul__ = __mul__

    def d_t(self) -> "Poly":
        return Poly({(i - 1, j): c * i for (i, j), c in self.terms.items() if i > 0})

    def d_r(self) -> "Poly":
        return Poly({(i, j - 1): c * j for (i, j), c in self.terms.items() if j > 0})

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and (self - other).is_zero()

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.terms.values())

    def __repr__(self) -> str:
        return f"Poly({self.terms})"


T = Poly({(1, 0): 1})
R = Poly({(0, 1): 1})
ONE = Poly.const(1)
ZERO = Poly()


@dataclass(frozen=True)
class Generator:
    """X = tau d/dt + rho d/dr + h u d/du (+ conjugate)."""

    tau: Poly
    rho: Poly
    h: Poly
    label: str = "composite"

    def __post_init__(self):
        for c in list(self.tau.terms.values()) + list(self.rho.terms.values()):
            if c.imag != 0:
                raise ParameterError("tau and rho must be real")

    @property
    def d_tau(self):
        return self.tau.d_t(), self.tau.d_r()

    @property
    def d_rho(self):
        return self.rho.d_t(), self.rho.d_r()

    @property
    def d_h(self):
        return self.h.d_t(), self.h.d_r()

    def eta(self, t: float, r: float, u: complex) -> complex:
        return self.h(t, r) * u

    def apply_to(self, f: Poly) -> Poly:
        """X acting on a function of (t, r) only."""
        return self.tau * f.d_t() + self.rho * f.d_r()

    def __add__(self, other: "Generator") -> "Generator":
        return Generator(self.tau + other.tau, self.rho + other.rho, self.h + other.h)

    def __sub__(self, other: "Generator") -> "Generator":
        return self + other.scaled(-1)

    def scaled(self, c: float) -> "Generator":
        return Generator(self.tau * c, self.rho * c, self.h * c,
                         self.label if c == 1 else "composite")

    def equals(self, other: "Generator") -> bool:
        return self.tau == other.tau and self.rho == other.rho and self.h == other.h

    def is_zero(self) -> bool:
        return self.tau.is_zero() and self.rho.is_zero() and self.h.is_zero()


def make_generator(params: Parameters, label: str) -> Generator:
    """Base generators: phase, translation, scaling, inversion."""
    p = params.p
    if label == "phase":
        return Generator(ZERO, ZERO, Poly.const(1j), "phase")
    if label == "translation":
        return Generator(ONE, ZERO, ZERO, "translation")
    if label == "scaling":
        return Generator(2 * T, R, Poly.const(-2 / p), "scaling")
    if label == "inversion":
        require_pseudo_conformal(params, "inversion generator")
        h = -(T * (2 / p) + R * R * 0.25j)
        return Generator(T * T, T * R, h, "inversion")
    raise ParameterError(f"unknown generator {label!r}")


def lie_bracket(x1: Generator, x2: Generator) -> Generator:
    tau = x1.apply_to(x2.tau) - x2.apply_to(x1.tau)
    rho = x1.apply_to(x2.rho) - x2.apply_to(x1.rho)
    # the h1 h2 u products cancel, leaving only the derivative terms
    h = x1.apply_to(x2.h) - x2.apply_to(x1.h)
    return Generator(tau, rho, h)


# finite group actions -------------------------------------------------------

@dataclass(frozen=True)
class GroupAction:
    kind: str  # phase, time_translate, scale, invert
    parameter: float

    def __post_init__(self):
        if self.kind not in ("phase", "time_translate", "scale", "invert"):
            raise ParameterError(f"unknown group action {self.kind!r}")
        if not math.isfinite(self.parameter):
            raise ParameterError("group parameter must be finite")
        if self.kind == "scale" and not self.parameter > 0:
            raise ParameterError("scale factor must be > 0")


def apply_group(params: Parameters, g: GroupAction, s: Solution) -> Solution:
    """Image of a solution under a one-parameter symmetry group."""
    a = g.parameter
    p = params.p
    label = f"{g.kind}({a:g})[{s.label}]"
    if g.kind == "phase":
        c = cmath.exp(1j * a)
        return Solution(lambda t, r: c * s.eval(t, r), s.domain, label, s.meta)
    if g.kind == "time_translate":
        return Solution(lambda t, r: s.eval(t - a, r),
                        lambda t, r: s.contains(t - a, r), label, s.meta)
    if g.kind == "scale":
        amp = a ** (-2 / p)
        return Solution(lambda t, r: amp * s.eval(t / a ** 2, r / a),
                        lambda t, r: s.contains(t / a ** 2, r / a), label, s.meta)
    require_pseudo_conformal(params, "inversion action")

    def ev(t, r):
        g1 = 1 + a * t
        return (g1 ** (-2 / p) * cmath.exp(-1j * a * r * r / (4 + 4 * a * t))
                * s.eval(t / g1, r / g1))

    def dom(t, r):
        g1 = 1 + a * t
        return g1 > 0 and s.contains(t / g1, r / g1)

    return Solution(ev, dom, label, s.meta)


def invariance_defect(x: Generator, s: Solution, pt: SpacetimePoint) -> complex:
    """eta - tau u_t - rho u_r; zero iff s is invariant under x at pt."""
    out = x.h(pt.t, pt.r) * s(pt.t, pt.r)
    tau = x.tau(pt.t, pt.r)
    rho = x.rho(pt.t, pt.r)
    if tau != 0:
        out -= tau * partial_derivative(s, pt, "t")
    if rho != 0:
        out -= rho * partial_derivative(s, pt, "r")
    return out


# optimal subgroups ----------------------------------------------------------

@dataclass(frozen=True)
class SubgroupSpec:
    kind: str  # trans_phase, scal_phase, conf_phase
    parameter: float = 0.0

    def __post_init__(self):
        if self.kind not in ("trans_phase", "scal_phase", "conf_phase"):
            raise ParameterError(f"unknown subgroup {self.kind!r}")


def subgroup_generator(params: Parameters, sg: SubgroupSpec) -> Generator:
    phase = make_generator(params, "phase").scaled(sg.parameter)
    if sg.kind == "trans_phase":
        return make_generator(params, "translation") + phase
    if sg.kind == "scal_phase":
        return make_generator(params, "scaling") + phase
    return (make_generator(params, "translation")
            + make_generator(params, "inversion") + phase)


def arctan_inv(t: float) -> float:
    """arctan(1/t), continued to pi/2 at t = 0."""
    return math.pi / 2 if t == 0 else math.atan(1 / t)


def invariant_coordinates(params: Parameters, sg: SubgroupSpec):
    """(xi_map(t, r), U_map(t, r, u)) for the chosen subgroup."""
    p, c = params.p, sg.parameter
    if sg.kind == "trans_phase":
        return (lambda t, r: r,
                lambda t, r, u: cmath.exp(-1j * c * t) * u)
    if sg.kind == "scal_phase":
        return (lambda t, r: t / r ** 2,
                lambda t, r, u: r ** (2 / p) * cmath.exp(-1j * c * math.log(r)) * u)
    require_pseudo_conformal(params, "conf_phase subgroup")
    return (lambda t, r: (1 + t * t) / r ** 2,
            lambda t, r, u: (r ** (2 / p) * u * cmath.exp(
                1j * c * arctan_inv(t) + 1j * r * r * t / (4 * (1 + t * t)))))


def reconstruct(params: Parameters, sg: SubgroupSpec, U: Callable[[float], complex],
                U_domain: Callable[[float], bool] = lambda xi: True,
                label: str | None = None) -> Solution:
    """Group-invariant u(t, r) from a reduced profile U(xi)."""
    p, c = params.p, sg.parameter
    xi_map, _ = invariant_coordinates(params, sg)
    if sg.kind == "trans_phase":
        def ev(t, r):
            return cmath.exp(1j * c * t) * U(r)
    elif sg.kind == "scal_phase":
        def ev(t, r):
            return r ** (-2 / p) * cmath.exp(1j * c * math.log(r)) * U(t / r ** 2)
    else:
        def ev(t, r):
            ph = -c * arctan_inv(t) - r * r * t / (4 * (1 + t * t))
            return r ** (-2 / p) * cmath.exp(1j * ph) * U((1 + t * t) / r ** 2)

    # arctan(1/t) jumps across t = 0, so a rotating conf_phase field is
    # only smooth on one side; keep t > 0 there.
    one_sided = sg.kind == "conf_phase" and c != 0

    def dom(t, r):
        if one_sided and t <= 0:
            return False
        return U_domain(xi_map(t, r))

    return Solution(ev, dom, label or f"{sg.kind}({c:g})")
