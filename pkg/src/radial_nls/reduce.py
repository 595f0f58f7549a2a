"""Reduced ODEs of the three optimal subgroups and their numerical treatment.

Covers the complex profile equations, their polar (amplitude/phase) forms,
the phase first integrals and level-set amplitude equations, canonical
charts, an embedded Runge-Kutta integrator, the linearised closed forms
and the self-similar blow-up profile equations.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (ConstraintError, DomainError, NumericError, ParameterError, Parameters,
                   Solution)
from .specfun import (BesselKind, WhittakerAntiderivative, WhittakerParams, bessel,
                      whittaker_m)
from .symmetry import SubgroupSpec, require_pseudo_conformal

UNDERFLOW = 1e-13


class PolarSingular(DomainError):
    kind = "polar_singular"


class ChartConstraint(ConstraintError):
    kind = "chart_constraint"


class IntegrationError(NumericError):
    """Integration stopped; ``last_xi`` is the last accepted abscissa."""

    kind = "stiff_or_singular"

    def __init__(self, message: str, last_xi: float):
        super().__init__(f"{message} (last xi = {last_xi!r})")
        self.last_xi = last_xi


class PastBlowup(DomainError):
    kind = "past_blowup"


def _nonlinear(k: float, p: float, U: complex) -> complex:
    """k |U|^p U, with the p = -1 case written as k U/|U| behind a guard."""
    a = abs(U)
    if p < 0 and a <= UNDERFLOW:
        raise NumericError(f"amplitude_underflow: |U| = {a:.3g}", kind="amplitude_underflow")
    if p == -1:
        return k * U / a
    return k * a ** p * U


def _power(k: float, p: float, A: float) -> float:
    """k A^(p+1) for a positive amplitude."""
    if p < 0 and A <= UNDERFLOW:
        raise NumericError(f"amplitude_underflow: A = {A:.3g}", kind="amplitude_underflow")
    return k * A ** (p + 1)


# reduced ODEs -------------------------------------------------------------------

@dataclass(frozen=True)
class ReducedODE:
    subgroup: SubgroupSpec
    params: Parameters
    rhs: Callable[[float, complex, complex], complex] = field(repr=False)
    singular_points: tuple = (0.0,)


def _scal_coeffs(params: Parameters, mu: float):
    n, p = params.n, params.p
    beta = 8 - 2 * n + 8 / p
    q = (4 - 2 * n) / p + 4 / p ** 2 - mu * mu
    gamma = n - 2 - 4 / p
    return beta, q, gamma


def _conf_potential(n: float, kappa: float, xi: float) -> float:
    return kappa / xi - 0.25 / (xi * xi) + n * (1 - n / 4)


def reduced_ode(params: Parameters, sg: SubgroupSpec) -> ReducedODE:
    """U'' as a function of (xi, U, U') for the chosen subgroup."""
    n, p, k, c = params.n, params.p, params.k, sg.parameter
    if sg.kind == "trans_phase":
        def rhs(xi, U, Up):
            return -(n - 1) / xi * Up - c * U - _nonlinear(k, p, U)

    elif sg.kind == "scal_phase":
        beta, q, gamma = _scal_coeffs(params, c)

        def rhs(xi, U, Up):
            lin = (beta * xi - 1j * (1 + 4 * c * xi)) * Up + (q + 1j * c * gamma) * U
            return -(lin + _nonlinear(k, p, U)) / (4 * xi * xi)

    else:
        require_pseudo_conformal(params, "conf_phase reduction")

        def rhs(xi, U, Up):
            lin = 8 * xi * Up + _conf_potential(n, c, xi) * U
            return -(lin + _nonlinear(k, p, U)) / (4 * xi * xi)

    return ReducedODE(sg, params, rhs)


@dataclass(frozen=True)
class PolarState:
    A: float
    Phi: float
    dA: float
    dPhi: float

    def __post_init__(self):
        if not self.A > 0:
            raise PolarSingular(f"polar form needs A > 0, got {self.A}")

    @property
    def U(self) -> complex:
        return self.A * cmath.exp(1j * self.Phi)

    @property
    def dU(self) -> complex:
        return (self.dA + 1j * self.A * self.dPhi) * cmath.exp(1j * self.Phi)


def polar_rhs(ode: ReducedODE) -> Callable[[float, PolarState], tuple]:
    """(A'', Phi'') of the real amplitude/phase system for U = A e^(i Phi)."""
    params, sg = ode.params, ode.subgroup
    n, p, k, c = params.n, params.p, params.k, sg.parameter

    if sg.kind == "trans_phase":
        def f(xi, s: PolarState):
            A, dA, dP = s.A, s.dA, s.dPhi
            ddA = A * dP * dP - (n - 1) * dA / xi - c * A - _power(k, p, A)
            ddP = -2 * dA * dP / A - (n - 1) * dP / xi
            return ddA, ddP

    elif sg.kind == "scal_phase":
        beta, q, gamma = _scal_coeffs(params, c)

        def f(xi, s: PolarState):
            A, dA, dP = s.A, s.dA, s.dPhi
            w = 1 + 4 * c * xi
            x2 = 4 * xi * xi
            ddA = (x2 * A * dP * dP - beta * xi * dA - w * A * dP - q * A
                   - _power(k, p, A)) / x2
            ddP = (-2 * x2 * dA * dP / A + w * dA / A - beta * xi * dP - c * gamma) / x2
            return ddA, ddP

    else:
        def f(xi, s: PolarState):
            A, dA, dP = s.A, s.dA, s.dPhi
            x2 = 4 * xi * xi
            ddA = (x2 * A * dP * dP - 8 * xi * dA - _conf_potential(n, c, xi) * A
                   - _power(k, p, A)) / x2
            ddP = -2 * dA * dP / A - 2 * dP / xi
            return ddA, ddP

    return f


def first_integral_C1(params: Parameters, sg: SubgroupSpec, xi: float, U: complex,
                      dU: complex) -> float:
    """Phase first integral; constant along solutions (scal_phase: only for p = 4/n)."""
    U, dU = complex(U), complex(dU)
    bil = U * dU.conjugate() - dU * U.conjugate()  # purely imaginary
    if sg.kind == "trans_phase":
        val = 0.5j * xi ** (params.n - 1) * bil
    elif sg.kind == "scal_phase":
        val = 2j * xi * xi * bil - (0.5 + 2 * sg.parameter * xi) * abs(U) ** 2
    else:
        val = 2j * xi * xi * bil
    if abs(val.imag) > 1e-12 * max(1.0, abs(val)):
        raise NumericError(f"first integral has imaginary part {val.imag:.3g}")
    return val.real


def phase_rate(params: Parameters, sg: SubgroupSpec, C1: float) -> Callable:
    """Phi'(xi, A) implied by the first integral at level C1."""
    n, c = params.n, sg.parameter
    if sg.kind == "trans_phase":
        return lambda xi, A: C1 * xi ** (1 - n) / (A * A)
    if sg.kind == "scal_phase":
        return lambda xi, A: (C1 + (0.5 + 2 * c * xi) * A * A) / (4 * xi * xi * A * A)
    return lambda xi, A: C1 / (4 * xi * xi * A * A)


@dataclass(frozen=True)
class LevelSetODE:
    C1: float
    rhs: Callable[[float, float, float], float] = field(repr=False)
    phase_rate: Callable[[float, float], float] = field(repr=False)
    linear: bool = False


def level_set_ode(params: Parameters, sg: SubgroupSpec, C1: float) -> LevelSetODE:
    """Amplitude equation A'' = F(xi, A, A') after eliminating the phase."""
    polar = polar_rhs(reduced_ode(params, sg))
    rate = phase_rate(params, sg, C1)

    def rhs(xi, A, dA):
        if not A > 0:
            raise PolarSingular(f"level-set ODE needs A > 0, got {A}")
        return polar(xi, PolarState(A, 0.0, dA, rate(xi, A)))[0]

    return LevelSetODE(C1, rhs, rate, linear=(C1 == 0 and params.p == -1))


# integration ------------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

ABS_FLOOR = 1e-14
MAX_STEPS = 200_000


@dataclass(frozen=True)
class Trajectory:
    xi: np.ndarray
    y: np.ndarray   # shape (m, d)
    dy: np.ndarray  # shape (m, d)

    def __post_init__(self):
        for a in (self.xi, self.y, self.dy):
            a.setflags(write=False)


def _as_vec(v) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(v))
    return arr.astype(complex if np.iscomplexobj(arr) else float)


def integrate_ode(rhs: Callable, xi0: float, y0, dy0, xi_end: float, tol: float = 1e-10,
                  samples: Sequence[float] | None = None,
                  singular_points: Sequence[float] = (0.0,)) -> Trajectory:
    """Second-order system y'' = rhs(xi, y, y') by adaptive Dormand-Prince 5(4).

    ``y0``/``dy0`` may be scalars or vectors, real or complex; ``rhs``
    receives and returns the same shape.  The step is clipped so that each
    requested sample abscissa is hit exactly.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    for sp in singular_points:
        if min(xi0, xi_end) <= sp <= max(xi0, xi_end):
            raise IntegrationError(f"interval [{xi0}, {xi_end}] touches the singular "
                                   f"point {sp}", xi0)
    y0v, dy0v = _as_vec(y0), _as_vec(dy0)
    cplx = np.iscomplexobj(y0v) or np.iscomplexobj(dy0v)
    d = y0v.size
    dtype = complex if cplx else float
    state = np.concatenate([y0v, dy0v]).astype(dtype)
    scalar = np.ndim(y0) == 0

    def f(x, s):
        yy, dd = s[:d], s[d:]
        acc = rhs(x, yy[0], dd[0]) if scalar else rhs(x, yy, dd)
        return np.concatenate([dd, np.atleast_1d(np.asarray(acc, dtype=dtype))])

    direction = 1.0 if xi_end >= xi0 else -1.0
    if samples is None:
        targets = [xi_end]
    else:
        targets = sorted({float(s) for s in samples} | {float(xi_end)},
                         key=lambda s: direction * s)
        for s in targets:
            if direction * (s - xi0) < 0 or direction * (s - xi_end) > 0:
                raise ParameterError(f"sample {s} outside [{xi0}, {xi_end}]")
    out_x, out_s = [], []
    if targets and targets[0] == xi0:
        out_x.append(xi0)
        out_s.append(state.copy())
        targets = targets[1:]
    x = float(xi0)
    h = direction * min(abs(xi_end - xi0), 1e-2 * max(1.0, abs(x)))
    k1 = f(x, state)
    steps = 0
    ti = 0
    while ti < len(targets):
        target = targets[ti]
        if direction * (x + h - target) > 0:
            h = target - x
        if abs(h) < 1e-13 * max(1.0, abs(x)):
            raise IntegrationError("step size underflow", x)
        ks = [k1]
        for i in range(1, 7):
            inc = sum(a * kk for a, kk in zip(_A[i], ks))
            ks.append(f(x + _C[i] * h, state + h * inc))
        new = state + h * sum(b * kk for b, kk in zip(_B5, ks))
        err = h * sum(e * kk for e, kk in zip(_E, ks))
        scale = tol * np.maximum(np.abs(state), np.abs(new)) + ABS_FLOOR
        enorm = float(np.max(np.abs(err) / scale))
        if not np.all(np.isfinite(new)):
            enorm = math.inf
        if enorm <= 1.0:
            x = target if x + h == target or abs(x + h - target) <= 1e-15 * max(1, abs(x)) \
                else x + h
            state = new
            k1 = ks[6]
            if x == target:
                out_x.append(x)
                out_s.append(state.copy())
                ti += 1
            fac = 5.0 if enorm == 0 else min(5.0, 0.9 * enorm ** -0.2)
        else:
            fac = 0.2 if not math.isfinite(enorm) else max(0.2, 0.9 * enorm ** -0.2)
        h *= fac
        steps += 1
        if steps > MAX_STEPS:
            raise IntegrationError("too many steps", x)
    arr = np.array(out_s)
    return Trajectory(np.array(out_x, dtype=float), arr[:, :d].copy(), arr[:, d:].copy())


def integrate_reduced(ode: ReducedODE, xi0: float, U0: complex, dU0: complex,
                      xi_end: float, tol: float = 1e-10,
                      samples: Sequence[float] | None = None) -> Trajectory:
    return integrate_ode(ode.rhs, xi0, complex(U0), complex(dU0), xi_end, tol, samples,
                         ode.singular_points)


def integrate_polar(ode: ReducedODE, xi0: float, s0: PolarState, xi_end: float,
                    tol: float = 1e-10, samples: Sequence[float] | None = None) -> Trajectory:
    """Trajectory of (A, Phi) with derivatives (A', Phi')."""
    f = polar_rhs(ode)

    def rhs(xi, y, dy):
        return np.array(f(xi, PolarState(y[0], y[1], dy[0], dy[1])))

    return integrate_ode(rhs, xi0, np.array([s0.A, s0.Phi]), np.array([s0.dA, s0.dPhi]),
                         xi_end, tol, samples, ode.singular_points)


def trajectory_rows(params: Parameters, sg: SubgroupSpec, traj: Trajectory) -> list:
    """Rows (xi, u_re, u_im, a, phi, c1) for a complex profile trajectory."""
    rows = []
    for x, y, dy in zip(traj.xi, traj.y, traj.dy):
        U, dU = complex(y[0]), complex(dy[0])
        try:
            c1 = first_integral_C1(params, sg, x, U, dU)
        except NumericError:
            c1 = math.nan
        rows.append((float(x), U.real, U.imag, abs(U), cmath.phase(U), c1))
    return rows


def trajectory_csv(rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("xi", "u_re", "u_im", "a", "phi", "c1"))
    for r in rows:
        w.writerow([repr(float(v)) for v in r])
    return buf.getvalue()


# canonical charts -----------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalChart:
    """(xi, A or U) -> (z, B or V) with B = multiplier(xi) A + shift(xi)."""

    name: str
    z_of_xi: Callable[[float], float] = field(repr=False)
    xi_of_z: Callable[[float], float] = field(repr=False)
    multiplier: Callable[[float], float] = field(repr=False)
    interval: tuple = (0.0, math.inf)
    shift: Callable[[float], float] = field(default=lambda xi: 0.0, repr=False)
    transformed_rhs: Callable | None = field(default=None, repr=False)
    invariant_solution: float | None = None

    def contains(self, xi: float) -> bool:
        lo, hi = self.interval
        return lo < xi < hi

    def forward(self, xi: float, A):
        if not self.contains(xi):
            raise DomainError(f"{self.name} chart: xi = {xi} outside {self.interval}")
        return self.z_of_xi(xi), self.multiplier(xi) * A + self.shift(xi)

    def inverse(self, z: float, B):
        xi = self.xi_of_z(z)
        return xi, (B - self.shift(xi)) / self.multiplier(xi)


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-12 * max(1.0, abs(b))


def canonical_chart(params: Parameters, which: str, C1: float = 0.0) -> CanonicalChart:
    """Canonical coordinates of a symmetry of the static (nu = 0) reduction.

    ``which`` is "scaling", "dilation" or "hidden3".."hidden6" (the hidden
    symmetries of the level-set equation).
    """
    n, p, k = params.n, params.p, params.k
    if which == "scaling":
        b = n - 2 - 4 / p
        c = 2 * (2 - n) / p + 4 / p ** 2

        def rhs(z, V, dV):
            return -b * dV - c * V - _nonlinear(k, p, V)

        return CanonicalChart("scaling", math.log, math.exp, lambda xi: xi ** (2 / p),
                              transformed_rhs=rhs)
    if which == "dilation":
        if _near(n, 2) or _near(n, 3) or not _near(p, 2 * (3 - n) / (n - 2)):
            raise ChartConstraint("dilation chart needs p = 2(3-n)/(n-2), n != 2, 3")
        e = n - 2
        lo, hi = (0.0, math.inf)

        def rhs(z, V, dV):
            return -k * (1 + p / 2) ** 2 * _nonlinear(1.0, p, V)

        return CanonicalChart("dilation", lambda xi: xi ** e, lambda z: z ** (1 / e),
                              lambda xi: xi ** e, (lo, hi), transformed_rhs=rhs)
    if which in ("hidden3", "hidden4"):
        if not _near(p, -4):
            raise ChartConstraint(f"{which} chart needs p = -4")
        if C1 == 0:
            raise ChartConstraint(f"{which} chart needs C1 != 0")
    if which == "hidden3":
        if not _near(n, 4 / 3):
            raise ChartConstraint("hidden3 chart needs n = 4/3")
        if not k > 0:
            raise ChartConstraint("hidden3 chart needs C1^2/k - xi^(2/3) > 0, so k > 0")
        a = C1 * C1 / k

        def rhs(z, B, dB):
            return (2 / 3) * dB + B / 3 + 4 * k * B ** -3

        return CanonicalChart(
            "hidden3", lambda xi: -0.75 * math.log(a - xi ** (2 / 3)),
            lambda z: (a - math.exp(-4 * z / 3)) ** 1.5,
            lambda xi: (a - xi ** (2 / 3)) ** -0.75, (0.0, a ** 1.5),
            transformed_rhs=rhs, invariant_solution=_real_root(-12 * k, 4))
    if which == "hidden4":
        if not _near(n, 0):
            raise ChartConstraint("hidden4 chart needs n = 0")
        # C1^2 xi^2 - k > 0: everywhere for k < 0, beyond sqrt(k)/|C1| for k > 0
        lo4 = math.sqrt(k) / abs(C1) if k > 0 else 0.0

        def rhs(z, B, dB):
            return 2 * k * dB + 3 * k * k * B + 4 * B ** -3

        def xi_of_z(z):
            w = math.exp(4 * k * z)  # xi^2/(C1^2 xi^2 - k)
            return math.sqrt(-k * w / (1 - C1 * C1 * w))

        return CanonicalChart(
            "hidden4", lambda xi: math.log(xi * xi / (C1 * C1 * xi * xi - k)) / (4 * k),
            xi_of_z, lambda xi: xi ** -0.5 * (C1 * C1 * xi * xi - k) ** -0.75, (lo4, math.inf),
            transformed_rhs=rhs, invariant_solution=_real_root(-0.75 * k * k, -4))
    if which == "hidden5":
        if not (_near(p, 1) and _near(n, 16)):
            raise ChartConstraint("hidden5 chart needs p = 1, n = 16")
        return CanonicalChart(
            "hidden5", lambda xi: -0.5 / (xi * xi), lambda z: math.sqrt(-0.5 / z),
            lambda xi: xi ** 6, shift=lambda xi: -(24 / k) * xi ** 4,
            transformed_rhs=lambda z, B, dB: -k * B * B, invariant_solution=0.0)
    if which == "hidden6":
        if not (_near(p, 1) and _near(n, 13 / 3)):
            raise ChartConstraint("hidden6 chart needs p = 1, n = 13/3")
        return CanonicalChart(
            "hidden6", lambda xi: xi ** (1 / 3) / 3, lambda z: (3 * z) ** 3,
            lambda xi: xi ** (4 / 3), shift=lambda xi: -(2 / (3 * k)) * xi ** (-2 / 3),
            transformed_rhs=lambda z, B, dB: -81 * k * B * B, invariant_solution=0.0)
    raise ParameterError(f"unknown chart {which!r}")


def _real_root(x: float, m: int) -> float | None:
    """x^(1/m) for x > 0 (m may be negative); None when no real positive root."""
    return x ** (1 / m) if x > 0 else None


def lemma_invariant_amplitude(b: float, c: float, k: float, p: float) -> dict:
    """z-translation invariant solutions |V| of V'' + b V' + c V + k|V|^p V = 0.

    The generic branch needs c/k < 0 and gives |V| = (-c/k)^(1/p).  For p
    a rational with odd numerator a real root of -c/k can exist even when
    it is negative; that exceptional branch is reported separately.
    """
    ratio = -c / k
    if ratio > 0:
        return {"branch": "generic", "amplitude": ratio ** (1 / p)}
    from fractions import Fraction
    fr = Fraction(p).limit_denominator(1000)
    if ratio < 0 and fr.numerator % 2 == 1 and abs(float(fr) - p) < 1e-12:
        root = -((-ratio) ** (1 / p))
        if fr.denominator % 2 == 1:
            return {"branch": "odd_numerator", "amplitude": abs(root), "signed_root": root}
    return {"branch": "none", "amplitude": None}


# closed-form reduced solutions ----------------------------------------------------

def scaling_invariant_profile(params: Parameters) -> Callable[[float], float]:
    """U = (2(n-2-2/p)/(kp))^(1/p) xi^(-2/p), the scaling-invariant static profile."""
    n, p, k = params.n, params.p, params.k
    base = 2 * (n - 2 - 2 / p) / (k * p)
    if not base > 0:
        raise ConstraintError("scaling-invariant profile needs 2(n-2-2/p)/(kp) > 0")
    amp = base ** (1 / p)
    return lambda xi: amp * xi ** (-2 / p)


def hidden_profiles(params: Parameters, which: str, C3: float = 1.0, sign: int = 1):
    """Real amplitudes A(xi) from the hidden-symmetry reductions (C1 = C2 = 0)."""
    k = params.k
    if which == "hidden5":
        return lambda xi: (96 * C3 / k) * (C3 * xi * xi + sign) / (2 * C3 * xi * xi + sign) ** 2
    if which == "hidden5-inv":
        return lambda xi: 24 / (k * xi * xi)
    if which == "hidden6":
        return lambda xi: ((2 * C3 / k) * xi ** -2 * (3 * C3 + 2 * sign * xi ** (1 / 3))
                           / (3 * C3 + sign * xi ** (1 / 3)) ** 2)
    if which == "hidden6-inv":
        return lambda xi: 2 / (3 * k * xi * xi)
    raise ParameterError(f"unknown hidden profile {which!r}")


def hidden4_invariant(params: Parameters, C1: float):
    """(A, Phi) of the p = -4, n = 0 invariant solution."""
    k = params.k
    pre = (0.75 * k * k) ** -0.25

    def A(xi):
        return pre * xi ** 0.5 * (k - C1 * C1 * xi * xi) ** 0.75

    # the phase sign follows from Phi' = C1 xi / A^2 (n = 0)
    def Phi(xi):
        return (math.sqrt(3) * C1 / 2) * (k / (xi * xi) - C1 * C1) ** -0.5

    return A, Phi


# linearisations (C1 = 0, p = -1) ----------------------------------------------------

def linear_trans_solution(params: Parameters, nu: float, C2: float, C3: float):
    """General solution of A'' + (n-1)A'/xi + nu A + k = 0."""
    n, k = params.n, params.k
    order = abs(n - 2) / 2
    if nu > 0:
        q = math.sqrt(nu)
        return lambda xi: (xi ** (1 - n / 2) * (C2 * bessel(BesselKind.J, order, q * xi)
                                                + C3 * bessel(BesselKind.Y, order, q * xi))
                           - k / nu)
    if nu < 0:
        q = math.sqrt(-nu)
        return lambda xi: (xi ** (1 - n / 2) * (C2 * bessel(BesselKind.I, order, q * xi)
                                                + C3 * bessel(BesselKind.K, order, q * xi))
                           - k / nu)
    if _near(n, 2):
        return lambda xi: -(k / 4) * xi * xi + C3 * math.log(xi) + C2
    if _near(n, 0):
        return lambda xi: -(k / 2) * xi * xi * math.log(xi) + C3 * xi * xi + C2
    return lambda xi: -(k / (2 * n)) * xi * xi + C3 * xi ** (2 - n) + C2


def linear_trans_ode(params: Parameters, nu: float):
    n, k = params.n, params.k
    return lambda xi, A, dA, ddA: ddA + (n - 1) * dA / xi + nu * A + k


def _whittaker_general(pref: complex, Ma: WhittakerParams, Mb: WhittakerParams,
                       arg: Callable, C2: float, C3: float, base: float):
    """C2 Ma(z) + C3 Mb(z) + pref (Mb(z) int Ma - Ma(z) int Mb), z = arg(xi)."""
    int_a = WhittakerAntiderivative(Ma, arg, base)
    int_b = WhittakerAntiderivative(Mb, arg, base)

    def A(xi):
        z = arg(xi)
        ma, mb = whittaker_m(Ma, z), whittaker_m(Mb, z)
        return C2 * ma + C3 * mb + pref * (mb * int_a(xi) - ma * int_b(xi))

    return A


def linear_scal_solution(params: Parameters, mu: float, C2: float, C3: float,
                         base: float = 0.5):
    """Amplitude of the linearised scaling reduction (needs mu = 0 to terminate)."""
    if not (_near(params.p, -1) and _near(params.n, -4)):
        raise ConstraintError("scaling linearisation needs p = -1, n = -4")
    kap = -0.5j * mu
    return _whittaker_general(1j * params.k / 3, WhittakerParams(kap, 1.5),
                              WhittakerParams(kap, -1.5), lambda x: 0.25j / x, C2, C3, base)


def linear_scal_ode(params: Parameters, mu: float):
    k = params.k
    return lambda xi, A, dA, ddA: (4 * xi * xi * ddA + 8 * xi * dA
                                   + (1 / (16 * xi * xi) + mu / (2 * xi) - 8) * A + k)


def linear_conf_solution(params: Parameters, kappa: float, C2: float, C3: float,
                         base: float = 0.5):
    if not (_near(params.p, -1) and _near(params.n, -4)):
        raise ConstraintError("pseudo-conformal linearisation needs p = -1, n = -4")
    kap = kappa / 2
    Mp, Mm = WhittakerParams(kap, 1.5), WhittakerParams(kap, -1.5)
    # k/6 (M+ int M- - M- int M+)
    return _whittaker_general(params.k / 6, Mm, Mp, lambda x: 0.5 / x, C3, C2, base)


def linear_conf_ode(params: Parameters, kappa: float):
    k = params.k
    return lambda xi, A, dA, ddA: (4 * xi * xi * ddA + 8 * xi * dA
                                   + (kappa / xi - 0.25 / (xi * xi) - 8) * A + k)


# blow-up -------------------------------------------------------------------------

@dataclass(frozen=True)
class BlowupSpec:
    regime: str  # critical, supercritical
    omega: float
    T: float

    def __post_init__(self):
        if self.regime not in ("critical", "supercritical"):
            raise ParameterError(f"unknown blow-up regime {self.regime!r}")
        if self.omega == 0 or not math.isfinite(self.omega):
            raise ParameterError("omega must be finite and non-zero")
        if not math.isfinite(self.T):
            raise ParameterError("blow-up time must be finite")


def _gate_blowup(params: Parameters, spec: BlowupSpec) -> None:
    if spec.regime == "critical":
        require_pseudo_conformal(params, "critical blow-up")
    elif not (params.n > 0 and params.p > 4 / params.n):
        raise ConstraintError("supercritical blow-up needs p > 4/n", kind="not_supercritical")


def blowup_ode(params: Parameters, spec: BlowupSpec) -> Callable:
    """U''(xi, U, U') of the self-similar blow-up profile."""
    _gate_blowup(params, spec)
    n, p, k, w = params.n, params.p, params.k, spec.omega
    if spec.regime == "critical":
        def rhs(xi, U, Up):
            return -(n - 1) / xi * Up - w * U - _nonlinear(k, 4 / n, U)
    else:
        def rhs(xi, U, Up):
            return (-((n - 1) / xi - 0.5j * xi) * Up + (w + 1j / p) * U
                    - _nonlinear(k, p, U))
    return rhs


def blowup_constant_profile(params: Parameters, spec: BlowupSpec) -> float:
    """U = (-omega/k)^(n/4), the constant critical profile."""
    _gate_blowup(params, spec)
    if spec.regime != "critical":
        raise ConstraintError("a real constant profile exists only in the critical regime")
    ratio = -spec.omega / params.k
    if not ratio > 0:
        raise ConstraintError("constant profile needs -omega/k > 0")
    return ratio ** (params.n / 4)


def blowup_reconstruct(params: Parameters, spec: BlowupSpec, U: Callable[[float], complex],
                       t: float, r: float) -> complex:
    _gate_blowup(params, spec)
    tau = spec.T - t
    if not tau > 0:
        raise PastBlowup(f"t = {t} is not before the blow-up time {spec.T}")
    n, p, w = params.n, params.p, spec.omega
    if spec.regime == "critical":
        return (tau ** (-n / 2) * U(r / tau)
                * cmath.exp(1j * (w + r * r / 4) / tau))
    return tau ** (-1 / p) * U(r / math.sqrt(tau)) * cmath.exp(1j * w * math.log(tau / spec.T))


def blowup_solution(params: Parameters, spec: BlowupSpec,
                    U: Callable[[float], complex]) -> Solution:
    def dom(t, r):
        return t < spec.T

    return Solution(lambda t, r: blowup_reconstruct(params, spec, U, t, r), dom,
                    f"blowup[{spec.regime}]")
