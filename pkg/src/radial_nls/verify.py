"""Verification harness: PDE residuals, symmetry orbits, quadratures, fixture suite."""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from scipy.optimize import brentq

from .core import (DomainError, NumericError, Parameters, RadialNLSError, Solution,
                   SpacetimePoint, jet)
from .specfun import adaptive_simpson

EPS_SCALE = 1e-30
DEFAULT_THRESHOLD = 1e-6


class NoValidPoints(RadialNLSError):
    kind = "no_valid_points"


class TurningPoint(NumericError):
    kind = "turning_point"


@dataclass
class ResidualReport:
    points: list = field(default_factory=list)  # (t, r, |residual|, scale)
    max_relative: float = 0.0
    threshold: float = DEFAULT_THRESHOLD
    rejected: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.points) and self.max_relative <= self.threshold


def residual_at(params: Parameters, s: Solution, pt: SpacetimePoint,
                h_t: float | None = None, h_r: float | None = None) -> tuple:
    """(residual, scale) of i u_t - u_rr - (n-1) u_r/r - k|u|^p u at one point."""
    j = jet(s, pt, h_t, h_r)
    n, p, k = params.n, params.p, params.k
    au = abs(j.u)
    if au == 0 and p < 0:
        raise NumericError("amplitude_underflow: u = 0 with p < 0", kind="amplitude_underflow")
    nl = k * au ** p * j.u
    res = 1j * j.u_t - j.u_rr - (n - 1) / pt.r * j.u_r - nl
    scale = abs(j.u_t) + abs(j.u_rr) + abs(j.u_r / pt.r) + abs(k) * au ** (p + 1) + EPS_SCALE
    return res, scale


def pde_residual(params: Parameters, s: Solution, pts: list,
                 threshold: float = DEFAULT_THRESHOLD,
                 h_t: float | None = None, h_r: float | None = None) -> ResidualReport:
    if not pts:
        raise NoValidPoints("pde_residual: empty point list")
    rep = ResidualReport(threshold=threshold)
    for pt in pts:
        try:
            res, scale = residual_at(params, s, pt, h_t, h_r)
        except DomainError:
            rep.rejected += 1
            continue
        rep.points.append((pt.t, pt.r, abs(res), scale))
        rep.max_relative = max(rep.max_relative, abs(res) / scale)
    if not rep.points:
        raise NoValidPoints(f"{s.label}: every point was rejected")
    return rep


# symmetry orbits ------------------------------------------------------------

ORBIT_THRESHOLD = 1e-5
# {small, O(1), large-but-domain-safe} per action
ORBIT_PARAMETERS = {
    "phase": (0.3, 1.0, 3.0),
    "time_translate": (0.1, 0.5, 2.0),
    "scale": (0.9, 1.5, 3.0),
    "invert": (0.1, -0.5, -2.0),
}


def transform_points(g, pts: list) -> list:
    """Images of sample points under the spacetime part of a group action."""
    a = g.parameter
    out = []
    for pt in pts:
        if g.kind == "phase":
            out.append(pt)
        elif g.kind == "time_translate":
            out.append(SpacetimePoint(pt.t + a, pt.r))
        elif g.kind == "scale":
            out.append(SpacetimePoint(a * a * pt.t, a * pt.r))
        else:
            d = 1 - a * pt.t
            if d > 0:
                out.append(SpacetimePoint(pt.t / d, pt.r / d))
    return out


def orbit_check(params: Parameters, g, s: Solution, pts: list,
                threshold: float = ORBIT_THRESHOLD) -> ResidualReport:
    """Residual of the transformed solution at the transformed sample points."""
    from .symmetry import apply_group
    image = apply_group(params, g, s)
    moved = transform_points(g, pts)
    if not moved:
        raise NoValidPoints(f"{image.label}: no sample point survives the action")
    return pde_residual(params, image, moved, threshold)


def applicable_actions(params: Parameters) -> tuple:
    acts = ("phase", "time_translate", "scale")
    return acts + ("invert",) if params.is_pseudo_conformal else acts


# quadrature lemma cross-checks --------------------------------------------------

TURNING_MARGIN = 1e-3
QUAD_TOL = 1e-12
QUAD_AGREEMENT = 1e-6


@dataclass(frozen=True)
class QuadratureCase:
    """One solved case of the polar quadratures  int dA/sqrt(H) = +-z + C3.

    ``chart`` is "scaling" (z = ln xi) or "dilation" (z = xi^(n-2)).
    ``direction`` is the sign of dA/dz on the branch being checked, i.e.
    which root of A'^2 = H(A) is followed; the phase obeys Phi' = C2/A^2.
    """

    case_id: str
    chart: str
    p: float
    k: float
    s: float
    s_tilde: float | None
    C1: float
    C2: float
    direction: int
    z_range: tuple

    def H(self, A: float) -> float:
        p, k, C1, C2 = self.p, self.k, self.C1, self.C2
        if self.chart == "scaling":
            return (C1 - C2 * C2 / (A * A) + (2 / p) ** 2 * A * A
                    - 2 * k / (p + 2) * A ** (p + 2))
        return C1 - C2 * C2 / (A * A) - k * (p + 2) / 2 * A ** (p + 2)


@dataclass(frozen=True)
class ClosedForm:
    """Explicit A(z) (and Phi(z) when C2 != 0) for a quadrature case."""

    amplitude: Callable[[float], float]
    phase: Callable[[float], float] | None = None


@dataclass
class QuadratureReport:
    case_id: str
    rows: list = field(default_factory=list)  # (z, A_numeric, A_closed, Phi_num, Phi_closed)
    max_amplitude_error: float = 0.0
    max_phase_error: float = 0.0
    tolerance: float = QUAD_AGREEMENT

    @property
    def passed(self) -> bool:
        return (bool(self.rows) and self.max_amplitude_error <= self.tolerance
                and self.max_phase_error <= self.tolerance)


class QuadratureInverter:
    """A(z) from int_{A0}^{A} dA/sqrt(H) = direction (z - z0), by bracketing + brentq."""

    def __init__(self, case: QuadratureCase, z0: float, A0: float):
        self.case, self.z0, self.A0 = case, z0, A0
        self._check_H(A0)

    def _check_H(self, A: float) -> float:
        h = self.case.H(A) if A > 0 else -1.0
        if not h > TURNING_MARGIN:
            raise TurningPoint(f"{self.case.case_id}: H({A:.6g}) = {h:.3g} "
                               f"within the turning-point margin")
        return h

    def _valid(self, A: float) -> bool:
        return A > 0 and self.case.H(A) > TURNING_MARGIN

    def travel(self, A: float) -> float:
        """z-distance covered while moving from A0 to A along the branch."""
        self._check_H(A)
        val = adaptive_simpson(lambda a: 1 / math.sqrt(self._check_H(a)),
                               self.A0, A, QUAD_TOL).real
        return self.case.direction * val

    def __call__(self, z: float) -> float:
        target = z - self.z0
        if target == 0:
            return self.A0
        if target < 0:
            raise DomainError("QuadratureInverter: only forward travel from z0")
        d = self.case.direction
        step = 0.05 * max(abs(self.A0), 1e-3)
        lo = self.A0
        while True:
            hi = self.A0 + d * step
            if not self._valid(hi):
                # pull back to the edge of the admissible region
                good, bad = lo, hi
                for _ in range(80):
                    mid = 0.5 * (good + bad)
                    if self._valid(mid):
                        good = mid
                    else:
                        bad = mid
                hi = good
                if self.travel(hi) < target:
                    raise TurningPoint(f"{self.case.case_id}: turning point reached "
                                       f"before z = {z}")
                break
            if self.travel(hi) >= target:
                break
            lo, step = hi, 2 * step
            if step > 1e8:
                raise NumericError("quadrature inversion: bracket search diverged")
        return brentq(lambda a: self.travel(a) - target, min(lo, hi), max(lo, hi),
                      xtol=1e-15, rtol=1e-15)

    def phase_travel(self, A: float) -> float:
        c = self.case
        val = adaptive_simpson(lambda a: 1 / (a * a * math.sqrt(self._check_H(a))),
                               self.A0, A, QUAD_TOL).real
        return c.direction * c.C2 * val


def quadrature_check(case: QuadratureCase, closed: ClosedForm, n_points: int = 10,
                     tolerance: float = QUAD_AGREEMENT) -> QuadratureReport:
    """Compare the numerically inverted quadrature with the closed form."""
    z_lo, z_hi = case.z_range
    zs = [z_lo + (z_hi - z_lo) * j / (n_points - 1) for j in range(n_points)]
    inv = QuadratureInverter(case, z_lo, closed.amplitude(z_lo))
    phi0 = closed.phase(z_lo) if closed.phase is not None else 0.0
    rep = QuadratureReport(case.case_id, tolerance=tolerance)
    for z in zs:
        a_num = inv(z)
        a_ref = closed.amplitude(z)
        err = abs(a_num - a_ref) / max(1.0, abs(a_ref))
        rep.max_amplitude_error = max(rep.max_amplitude_error, err)
        ph_num = ph_ref = float("nan")
        if case.C2 != 0 and closed.phase is not None:
            ph_num = phi0 + inv.phase_travel(a_num)
            ph_ref = closed.phase(z)
            rep.max_phase_error = max(rep.max_phase_error,
                                      abs(ph_num - ph_ref) / max(1.0, abs(ph_ref)))
        rep.rows.append((z, a_num, a_ref, ph_num, ph_ref))
    return rep


def inversion_slope_defect(case: QuadratureCase, closed: ClosedForm, z: float,
                           h: float = 1e-4) -> float:
    """|dA/dz of the inverted quadrature - direction sqrt(H(A))| at z."""
    z_lo = case.z_range[0]
    inv = QuadratureInverter(case, z_lo, closed.amplitude(z_lo))
    a_p, a_m, a = inv(z + h), inv(z - h), inv(z)
    slope = (a_p - a_m) / (2 * h)
    return abs(slope - case.direction * math.sqrt(case.H(a)))


def standard_quadrature_cases() -> list:
    """(case, closed form) pairs for the explicitly solved cases of both charts.

    Constants are bound as default arguments since the names are reused.
    """
    out = []
    ch, sh = math.cosh, math.sinh

    # scaling chart, C1 = C2 = 0, p = 4, k = 3: sech branch
    p, k, C3 = 4.0, 3.0, 0.0
    amp = (2 * (p + 2) / (k * p * p)) ** (1 / p)
    out.append((QuadratureCase("scaling-a", "scaling", p, k, -p / 2, None, 0.0, 0.0, -1,
                               (0.2, 2.0)),
                ClosedForm(lambda z, amp=amp, C3=C3, p=p: amp * ch(z + C3) ** (-2 / p))))

    # scaling chart, p = -1, C1 > k^2/4: sinh branch
    k, C1, C3 = 1.0, 1.0, 0.5
    g = math.sqrt(4 * C1 - k * k)
    out.append((QuadratureCase("scaling-b-p-1", "scaling", -1.0, k, 1.0, None, C1, 0.0, 1,
                               (0.0, 1.0)),
                ClosedForm(lambda z, k=k, g=g, C3=C3: 0.25 * (k + g * sh(2 * (z + C3))))))

    # scaling chart, p = -4, C1^2 < k, C2 = 0: sinh branch for A^2
    k, C1, C3 = 2.0, 0.5, 1.0
    g2 = math.sqrt(k - C1 * C1)
    out.append((QuadratureCase("scaling-b-p-4", "scaling", -4.0, k, 2.0, None, C1, 0.0, 1,
                               (0.0, 1.5)),
                ClosedForm(lambda z, C1=C1, g2=g2, C3=C3: math.sqrt(-2 * C1 + 2 * g2 * sh(z + C3)))))

    # scaling chart, p = -4, C2 != 0: case c (C1 = 0) and case d (C1 != 0)
    for cid, k, C1, C2 in (("scaling-c", 2.0, 0.0, 1.0), ("scaling-d", 3.0, 0.5, 1.0)):
        C3, C4 = 3.0, 0.25
        D = k - C1 * C1 - C2 * C2
        gp = 0.5 / math.sqrt(k / C2 ** 2 - 1)

        def a_cd(z, C1=C1, D=D, C3=C3):
            return math.sqrt(-2 * C1 + 2 * math.sqrt(D) * sh(-z + C3))

        def ph_cd(z, k=k, C1=C1, C2=C2, D=D, C4=C4, gp=gp, a=a_cd):
            return C4 + gp * math.asinh((C1 + 2 * (k - C2 * C2) / a(z) ** 2) / math.sqrt(D))

        out.append((QuadratureCase(cid, "scaling", -4.0, k, 2.0, -2.0, C1, C2, -1,
                                   (0.0, 2.0)),
                    ClosedForm(a_cd, ph_cd)))

    # dilation chart, p = 2 (n = 5/2), C1 = C2 = 0, k < 0
    k, C3 = -1.0, 0.25
    out.append((QuadratureCase("dilation-a", "dilation", 2.0, k, -1.0, None, 0.0, 0.0, -1,
                               (0.0, 1.0)),
                ClosedForm(lambda z, k=k, C3=C3: 1 / (math.sqrt(-k * 4 * 4 / 8) * (z + C3)))))

    # dilation chart, p = -1 (n = 4): parabola
    k, C1, C3 = 1.0, 1.0, 1.0
    out.append((QuadratureCase("dilation-b", "dilation", -1.0, k, 1.0, None, C1, 0.0, -1,
                               (0.0, 2.0)),
                ClosedForm(lambda z, k=k, C1=C1, C3=C3: 2 * C1 / k - k / 8 * (z + C3) ** 2)))

    # dilation chart, p = -4 (n = 1), C1, C2 != 0
    k, C1, C2, C3, C4 = 2.0, 1.0, 1.0, 2.0, 0.1

    def a_dc(z, k=k, C1=C1, C2=C2, C3=C3):
        return math.sqrt((C2 * C2 - k) / C1 + C1 * (z + C3) ** 2)

    def ph_dc(z, k=k, C1=C1, C2=C2, C4=C4):
        g = math.sqrt(k - C2 * C2)
        return C4 - C2 / g * math.asinh(math.sqrt((k - C2 * C2) / C1) / a_dc(z))

    out.append((QuadratureCase("dilation-c", "dilation", -4.0, k, 2.0, -1.0, C1, C2, 1,
                               (0.0, 2.0)),
                ClosedForm(a_dc, ph_dc)))

    # dilation chart, p = -8 (n = 5/3), C1 = 0, C2 != 0
    k, C2, C3, C4 = 1.0, 1.0, -0.8, -0.3

    def a_dd(z, k=k, C2=C2, C3=C3):
        return (3 * k / C2 ** 2 - 4 * C2 ** 2 * (z + C3) ** 2) ** 0.25

    def ph_dd(z, k=k, C2=C2, C4=C4):
        return C4 + 0.5 * math.asin(C2 * a_dd(z) ** 2 / math.sqrt(3 * k))

    out.append((QuadratureCase("dilation-d", "dilation", -8.0, k, 4.0, 2.0, 0.0, C2, 1,
                               (0.0, 0.7)),
                ClosedForm(a_dd, ph_dd)))
    return out


# first-integral constancy on catalog solutions ----------------------------------

FIRST_INTEGRAL_TOL = 1e-6


def _subgroup_of(w) -> "SubgroupSpec | None":
    from .catalog import get_family
    from .symmetry import SubgroupSpec
    kind = get_family(w.family).subgroup
    fc = w.constants
    if kind is None:
        return None
    if kind == "trans":
        return SubgroupSpec("trans_phase", 0.0)
    if kind == "trans_phase":
        return SubgroupSpec(kind, fc.nu)
    if kind == "scal_phase":
        return SubgroupSpec(kind, fc.mu)
    return SubgroupSpec(kind, fc.kappa)


def profile_first_integral(params: Parameters, sg, s: Solution, pt: SpacetimePoint) -> float:
    """C1 of the reduced profile seen by the field s at one spacetime point."""
    from .core import partial_derivative
    from .reduce import first_integral_C1
    from .symmetry import invariant_coordinates
    xi_map, U_map = invariant_coordinates(params, sg)
    prof = Solution(lambda t, r: U_map(t, r, s.eval(t, r)), s.domain, "profile")
    coord = Solution(lambda t, r: complex(xi_map(t, r)), s.domain, "xi")
    x_t = partial_derivative(coord, pt, "t").real
    x_r = partial_derivative(coord, pt, "r").real
    # differentiate along whichever coordinate moves xi faster
    if abs(x_r) * pt.r >= abs(x_t) * max(1.0, abs(pt.t)):
        dU = partial_derivative(prof, pt, "r") / x_r
    else:
        dU = partial_derivative(prof, pt, "t") / x_t
    return first_integral_C1(params, sg, xi_map(pt.t, pt.r), prof(pt.t, pt.r), dU)


def first_integral_check(params: Parameters, sg, s: Solution, pts: list,
                         tolerance: float = FIRST_INTEGRAL_TOL) -> tuple:
    """(max spread relative to 1+|C1|, values) over the sample points.

    C1 is only constant along one connected piece of the domain, so points
    are compared against the first value seen on their own piece.
    """
    vals, spread, refs = [], 0.0, {}
    for pt in pts:
        try:
            v = profile_first_integral(params, sg, s, pt)
        except DomainError:
            continue
        vals.append(v)
        ref = refs.setdefault(_component(s, pts, pt), v)
        spread = max(spread, abs(v - ref) / (1 + abs(ref)))
    if not vals:
        raise NoValidPoints("first_integral_check: every point was rejected")
    return spread, vals


def _component(s: Solution, pts: list, pt: SpacetimePoint, samples: int = 256) -> int:
    # count domain gaps crossed on the radial segment from the innermost point
    r0 = min(q.r for q in pts)
    gaps, inside = 0, True
    for j in range(1, samples + 1):
        r = r0 + (pt.r - r0) * j / samples
        now = s.contains(pt.t, r)
        if inside and not now:
            gaps += 1
        inside = now
    return gaps


# fixture suite -------------------------------------------------------------------

ORBIT_POINTS = 12
CONSERVE_POINTS = 8


@dataclass(frozen=True)
class CheckResult:
    fixture: str
    check: str
    status: str  # pass, fail, error
    max_defect: float
    detail: str = ""


def _subsample(pts: list, m: int) -> list:
    return pts[::max(1, len(pts) // m)][:m]


def fixture_label(index: int, w) -> str:
    return f"{w.family}#{index}"


def run_fixture(w, label: str) -> list:
    """Every applicable check for one witness; never raises."""
    from .conserve import applicable_rows, conservation_check
    from .symmetry import GroupAction
    out = []

    def record(check, fn):
        try:
            ok, defect, detail = fn()
            out.append(CheckResult(label, check, "pass" if ok else "fail", defect, detail))
        except RadialNLSError as e:
            out.append(CheckResult(label, check, "error", math.nan, f"{e.kind}: {e}"))

    try:
        s = w.solution()
        pts = w.points()
    except RadialNLSError as e:
        return [CheckResult(label, "residual", "error", math.nan, f"{e.kind}: {e}")]

    def residual():
        rep = pde_residual(w.params, s, pts, w.tolerance)
        return rep.passed and len(rep.points) >= 20, rep.max_relative, f"{len(rep.points)} pts"

    record("residual", residual)
    opts = _subsample(pts, ORBIT_POINTS)
    for kind in applicable_actions(w.params):
        def orbit(kind=kind):
            worst, ok = 0.0, True
            for a in ORBIT_PARAMETERS[kind]:
                rep = orbit_check(w.params, GroupAction(kind, a), s, opts)
                worst = max(worst, rep.max_relative)
                ok = ok and rep.passed
            return ok, worst, ""
        record(f"orbit:{kind}", orbit)
    cpts = _subsample(pts, CONSERVE_POINTS)
    for row in applicable_rows(w.params):
        def cons(row=row):
            rep = conservation_check(w.params, row, s, cpts)
            return rep.passed, rep.max_relative, f"{len(rep.rows)} pts"
        record(f"conserve:{row}", cons)
    sg = _subgroup_of(w)
    if sg is not None and (sg.kind != "scal_phase" or w.params.is_pseudo_conformal):
        def fi():
            spread, vals = first_integral_check(w.params, sg, s, cpts)
            return spread <= FIRST_INTEGRAL_TOL, spread, f"C1 = {vals[0]:.6g}"
        record(f"first_integral:{sg.kind}", fi)
    return out


def _run_indexed(args):
    index, w = args
    return run_fixture(w, fixture_label(index, w))


@dataclass
class SuiteSummary:
    results: list
    elapsed: float
    fixtures: int

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.results)

    def matrix(self) -> dict:
        out: dict = {}
        for r in self.results:
            out.setdefault(r.fixture, {})[r.check] = r.status
        return out


def run_fixture_suite(filter: str | None = None, jobs: int = 1, path=None) -> SuiteSummary:
    """Run all witness fixtures whose family id starts with ``filter``."""
    from .catalog import load_witnesses
    try:
        witnesses = load_witnesses(path)
    except OSError as e:
        raise RadialNLSError(f"fixture file unavailable: {e}", kind="config")
    todo = [(i, w) for i, w in enumerate(witnesses)
            if filter is None or w.family.startswith(filter)]
    t0 = time.perf_counter()
    if not todo:
        warnings.warn(f"no fixture matches {filter!r}")
        return SuiteSummary([], 0.0, 0)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_run_indexed, todo))
    else:
        chunks = [_run_indexed(item) for item in todo]
    results = [r for chunk in chunks for r in chunk]
    return SuiteSummary(results, time.perf_counter() - t0, len(todo))


def perturbed(s: Solution, factor: float = 1.01) -> Solution:
    """Same field scaled by ``factor``; a negative control for the residual engine."""
    return Solution(lambda t, r: factor * s.eval(t, r), s.domain, f"{factor}*{s.label}",
                    s.meta)
