"""Radial conserved currents, local and global balance checks, modulation balance.

A current is a pair (T, X) of real densities built from (t, r, u, u_t, u_r)
with D_t T + D_r X = 0 on solutions.  The dilation and pseudo-conformal
energies exist only at the pseudo-conformal power p = 4/n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .core import (DomainError, ParameterError, Parameters, Solution,
                   SpacetimePoint, _first, check_finite, default_step, origin_limit,
                   partial_derivative)
from .specfun import adaptive_simpson
from .symmetry import require_pseudo_conformal

ROWS = ("charge", "energy", "dilation_energy", "pc_energy")
OUTER_FACTOR = 10.0
# inner steps are half the residual-engine steps so that the outer stencil
# (10x wider) stays a small fraction of r near strongly weighted origins
INNER_FACTOR = 0.5
DEFECT_TOL = 1e-5


@dataclass(frozen=True)
class CurrentPair:
    row: str
    T: Callable[[float, float, complex, complex, complex], float]
    X: Callable[[float, float, complex, complex, complex], float]


def _real(z: complex) -> float:
    return z.real if isinstance(z, complex) else float(z)


def current(params: Parameters, row: str) -> CurrentPair:
    """Density/flux pair for one row of the radial conservation-law table."""
    if row not in ROWS:
        raise ParameterError(f"unknown conservation row {row!r}")
    n, p, k = params.n, params.p, params.k
    if row in ("dilation_energy", "pc_energy"):
        require_pseudo_conformal(params, f"{row} current")
    if row != "charge" and p == -2:
        raise ParameterError("energy-type currents need p != -2")
    lag = 2 / (p + 2) * k if p != -2 else 0.0

    def w(r):
        return r ** (n - 1)

    def grad(r, u, u_r):
        # |u_r|^2 - (2/(p+2)) k |u|^(2+p), the Lagrangian combination
        return abs(u_r) ** 2 - lag * abs(u) ** (2 + p)

    def grad_plus(r, u, u_r):
        return abs(u_r) ** 2 + lag * abs(u) ** (2 + p)

    def ang(u, u_r):  # u conj(u_r) - conj(u) u_r, purely imaginary
        return u * u_r.conjugate() - u.conjugate() * u_r

    def sym(a, b):  # a conj(b) + conj(a) b, purely real
        return 2 * (a * b.conjugate()).real

    if row == "charge":
        def T(t, r, u, u_t, u_r):
            return -w(r) * abs(u) ** 2

        def X(t, r, u, u_t, u_r):
            return _real(1j * w(r) * ang(u, u_r))

    elif row == "energy":
        def T(t, r, u, u_t, u_r):
            return w(r) * grad(r, u, u_r)

        def X(t, r, u, u_t, u_r):
            return -w(r) * sym(u_t, u_r)

    elif row == "dilation_energy":
        def T(t, r, u, u_t, u_r):
            return _real(2 * t * w(r) * grad(r, u, u_r) + 0.5j * r ** n * ang(u, u_r))

        def X(t, r, u, u_t, u_r):
            return _real(-r ** n * grad_plus(r, u, u_r)
                         + 0.5j * r ** n * (u.conjugate() * u_t - u * u_t.conjugate())
                         - (2 / p) * w(r) * sym(u, u_r)
                         - 2 * t * w(r) * sym(u_t, u_r))

    else:
        def T(t, r, u, u_t, u_r):
            return _real(t * t * w(r) * grad(r, u, u_r) + 0.5j * t * r ** n * ang(u, u_r)
                         + 0.25 * r ** (n + 1) * abs(u) ** 2)

        def X(t, r, u, u_t, u_r):
            return _real(-(2 / p) * t * w(r) * sym(u, u_r)
                         - t * t * w(r) * sym(u_t, u_r)
                         - t * r ** n * grad_plus(r, u, u_r)
                         + 0.5j * t * r ** n * (u.conjugate() * u_t - u * u_t.conjugate())
                         - 0.25j * r ** (n + 1) * ang(u, u_r))

    return CurrentPair(row, T, X)


def applicable_rows(params: Parameters) -> tuple:
    rows = ["charge"]
    if params.p != -2:
        rows.append("energy")
        if params.is_pseudo_conformal:
            rows += ["dilation_energy", "pc_energy"]
    return tuple(rows)


def _density(cp: CurrentPair, s: Solution, t: float, r: float, h_t: float, h_r: float,
             which: str) -> float:
    pt = SpacetimePoint(t, r)
    u = s(t, r)
    u_t = partial_derivative(s, pt, "t", h_t)
    u_r = partial_derivative(s, pt, "r", h_r)
    f = cp.T if which == "T" else cp.X
    return f(t, r, u, u_t, u_r)


@dataclass(frozen=True)
class LocalDefect:
    defect: float
    scale: float
    dT_dt: float
    dX_dr: float


def local_defect(cp: CurrentPair, s: Solution, pt: SpacetimePoint,
                 h_t: float | None = None, h_r: float | None = None) -> LocalDefect:
    """D_t T + D_r X by nested differences, with its scale |T| + |X| + 1."""
    ht = INNER_FACTOR * default_step("t", pt) if h_t is None else h_t
    hr = INNER_FACTOR * default_step("r", pt) if h_r is None else h_r
    Ht, Hr = OUTER_FACTOR * ht, OUTER_FACTOR * hr
    offs = (-1.0, -0.5, 0.5, 1.0)
    tv = {o: _density(cp, s, pt.t + o * Ht, pt.r, ht, hr, "T") for o in offs}
    xv = {o: _density(cp, s, pt.t, pt.r + o * Hr, ht, hr, "X") for o in offs}
    d_t = _first(tv, Ht)
    d_r = _first(xv, Hr)
    T0 = _density(cp, s, pt.t, pt.r, ht, hr, "T")
    X0 = _density(cp, s, pt.t, pt.r, ht, hr, "X")
    return LocalDefect(abs(d_t + d_r), abs(T0) + abs(X0) + 1.0, d_t, d_r)


def local_conservation_defect(cp: CurrentPair, s: Solution, pt: SpacetimePoint,
                              h_t: float | None = None, h_r: float | None = None) -> float:
    return local_defect(cp, s, pt, h_t, h_r).defect


@dataclass
class ConservationReport:
    row: str
    rows: list  # (t, r, defect, scale)
    rejected: int = 0
    tolerance: float = DEFECT_TOL

    @property
    def max_relative(self) -> float:
        return max((d / sc for _, _, d, sc in self.rows), default=float("nan"))

    @property
    def passed(self) -> bool:
        return bool(self.rows) and self.max_relative <= self.tolerance


def conservation_check(params: Parameters, row: str, s: Solution, pts: list,
                       tolerance: float = DEFECT_TOL) -> ConservationReport:
    cp = current(params, row)
    rep = ConservationReport(row, [], tolerance=tolerance)
    for pt in pts:
        try:
            ld = local_defect(cp, s, pt)
        except DomainError:
            rep.rejected += 1
            continue
        rep.rows.append((pt.t, pt.r, ld.defect, ld.scale))
    return rep


# global quantities ----------------------------------------------------------

GLOBAL_TOL = 1e-10


def global_quantity(cp: CurrentPair, s: Solution, t: float, r_lo: float, r_hi: float,
                    tol: float = GLOBAL_TOL) -> float:
    """Integral of T(t, r, ...) over [r_lo, r_hi]."""
    if not 0 < r_lo < r_hi:
        raise DomainError("global_quantity: need 0 < r_lo < r_hi")
    for r in (r_lo, r_hi):
        if not s.contains(t, r):
            raise DomainError(f"global_quantity: ({t}, {r}) outside domain")
    pt = SpacetimePoint(t, 0.5 * (r_lo + r_hi))
    ht, hr = default_step("t", pt), None

    def dens(r):
        q = SpacetimePoint(t, r)
        return cp.T(t, r, s(t, r), partial_derivative(s, q, "t", ht),
                    partial_derivative(s, q, "r", hr))

    return adaptive_simpson(dens, r_lo, r_hi, tol).real


def global_balance_defect(cp: CurrentPair, s: Solution, t: float, r_lo: float,
                          r_hi: float, h: float = 1e-3, tol: float = GLOBAL_TOL) -> float:
    """d/dt of the integral plus the net boundary flux [X] from r_lo to r_hi."""
    q_plus = global_quantity(cp, s, t + h, r_lo, r_hi, tol)
    q_minus = global_quantity(cp, s, t - h, r_lo, r_hi, tol)
    rate = (q_plus - q_minus) / (2 * h)
    flux = [_density(cp, s, t, r, default_step("t", SpacetimePoint(t, r)),
                     default_step("r", SpacetimePoint(t, r)), "X") for r in (r_lo, r_hi)]
    return rate + flux[1] - flux[0]


# modulation balance ---------------------------------------------------------

@dataclass(frozen=True)
class ModulationReport:
    C: complex
    S: complex
    origin_term: complex
    boundary_term: complex
    dC_dt: complex
    balance_defect: complex

    def __post_init__(self):
        for name in ("C", "S", "origin_term", "boundary_term", "dC_dt", "balance_defect"):
            check_finite(getattr(self, name), name)


def _disk_integral(f: Callable[[float], complex], R: float, tol: float) -> complex:
    # f(r) carries the factor r, so the integrand vanishes at the origin
    return adaptive_simpson(lambda r: 0j if r == 0 else f(r), 0.0, R, tol)


def modulation_balance(params: Parameters, s: Solution, t: float, R: float,
                       h: float = 1e-3, tol: float = GLOBAL_TOL) -> ModulationReport:
    """Balance of the net modulation C(t) = int_0^R u r dr in the planar form.

    Writing the equation as i u_t = u_rr + u_r/r - m u_r/r + k|u|^p u with
    m = 2 - n and integrating against r dr over (0, R) gives

        dC/dt + S + i m u(t, 0+) + i (R u_r(t, R) - m u(t, R)) = 0,

    where S = i k int_0^R u |u|^p r dr.  The last bracket is the surface
    term left by truncating at R; it vanishes for fields decaying fast
    enough as R grows.
    """
    if not R > 0:
        raise DomainError("modulation_balance: R must be positive")
    m, p, k = params.m, params.p, params.k
    u0 = origin_limit(lambda r: s(t, r))
    # u_r must stay bounded too, otherwise r u_r does not vanish at 0
    origin_limit(lambda r: partial_derivative(s, SpacetimePoint(t, r), "r", r / 8))

    def charge(tt):
        return _disk_integral(lambda r: s(tt, r) * r, R, tol)

    C = charge(t)
    vals = {o: charge(t + o * h) for o in (-1.0, -0.5, 0.5, 1.0)}
    dC = _first(vals, h)
    S = 1j * k * _disk_integral(lambda r: s(t, r) * abs(s(t, r)) ** p * r, R, tol)
    origin = 1j * m * u0
    edge = SpacetimePoint(t, R)
    boundary = 1j * (R * partial_derivative(s, edge, "r") - m * s(t, R))
    return ModulationReport(C, S, origin, boundary, dC, dC + S + origin + boundary)


def csv_rows(family: str, rep: ConservationReport) -> list:
    """`family,row,t,r,defect,scale` lines (without header)."""
    return [(family, rep.row, t, r, d, sc) for t, r, d, sc in rep.rows]


__all__ = ["CurrentPair", "ModulationReport", "ConservationReport", "LocalDefect", "ROWS",
           "current", "applicable_rows", "local_defect", "local_conservation_defect",
           "conservation_check", "global_quantity", "global_balance_defect",
           "modulation_balance", "csv_rows"]
