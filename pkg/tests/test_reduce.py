import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from radial_nls import reduce as R
from radial_nls.core import ConstraintError, NumericError, Parameters, SpacetimePoint
from radial_nls.symmetry import NotPseudoConformal, SubgroupSpec
from radial_nls.verify import pde_residual

TRANS0 = SubgroupSpec("trans_phase", 0.0)


def fd_residual(A, ode, xs, h=1e-3):
    """max |ode(x, A, A', A'')| / (1 + |A|) with fourth-order differences."""
    worst = 0.0
    for x in xs:
        a = [A(x + j * h) for j in (-2, -1, 0, 1, 2)]
        d1 = (a[0] - 8 * a[1] + 8 * a[3] - a[4]) / (12 * h)
        d2 = (-a[0] + 16 * a[1] - 30 * a[2] + 16 * a[3] - a[4]) / (12 * h * h)
        worst = max(worst, abs(ode(x, a[2], d1, d2)) / (1 + abs(a[2])))
    return worst


def as_ode(rhs):
    return lambda x, A, dA, ddA: ddA - rhs(x, A, dA)


# reduced ODEs -----------------------------------------------------------------

def test_trans_rhs_on_monopole():
    ode = R.reduced_ode(Parameters(5, 1, 1), TRANS0)
    for xi in (0.5, 1.0, 3.0):
        U, dU, ddU = 2 / xi ** 2, -4 / xi ** 3, 12 / xi ** 4
        assert abs(ddU - ode.rhs(xi, U, dU)) <= 1e-12 * ddU


def test_scal_constant_residual():
    n, p, k, a = 3.0, 2.0, 1.0, 0.7
    ode = R.reduced_ode(Parameters(n, p, k), SubgroupSpec("scal_phase", 0.0))
    xi = 1.3
    # 4 xi^2 U'' + ... with U' = U'' = 0
    res = -4 * xi * xi * ode.rhs(xi, a, 0)
    assert abs(res - (((4 - 2 * n) / p + 4 / p ** 2) * a + k * a ** (p + 1))) <= 1e-12


def test_conf_gate():
    with pytest.raises(NotPseudoConformal):
        R.reduced_ode(Parameters(3, 2, 1), SubgroupSpec("conf_phase", 0.1))


def test_p_minus_one_underflow():
    ode = R.reduced_ode(Parameters(3, -1, 1), TRANS0)
    with pytest.raises(NumericError) as e:
        ode.rhs(1.0, 1e-14, 0.0)
    assert e.value.kind == "amplitude_underflow"


# polar form ---------------------------------------------------------------------

def test_polar_static_phase():
    n, p, k, nu = 3.0, 2.0, 1.5, 0.4
    f = R.polar_rhs(R.reduced_ode(Parameters(n, p, k), SubgroupSpec("trans_phase", nu)))
    xi, A, dA = 1.2, 0.8, -0.3
    ddA, ddP = f(xi, R.PolarState(A, 0.5, dA, 0.0))
    assert abs(ddA + (n - 1) * dA / xi + nu * A + k * A ** (p + 1)) <= 1e-14
    assert ddP == 0


@pytest.mark.parametrize("sg,params", [
    (SubgroupSpec("trans_phase", 0.6), Parameters(3, 2, 1)),
    (SubgroupSpec("scal_phase", 0.3), Parameters(2, 2, 1)),
    (SubgroupSpec("conf_phase", 0.5), Parameters(2, 2, -1)),
])
def test_polar_matches_complex_pointwise(sg, params):
    ode = R.reduced_ode(params, sg)
    f = R.polar_rhs(ode)
    for xi, st_ in [(0.7, R.PolarState(1.0, 0.0, 0.0, 0.0)),
                    (1.4, R.PolarState(0.6, 0.3, -0.2, 0.8))]:
        ddA, ddP = f(xi, st_)
        ddU = ode.rhs(xi, st_.U, st_.dU)
        # U'' = (A'' - A P'^2 + i(2A'P' + A P'')) e^(iP)
        rebuilt = (ddA - st_.A * st_.dPhi ** 2 + 1j * (2 * st_.dA * st_.dPhi + st_.A * ddP)) \
            * cmath.exp(1j * st_.Phi)
        assert abs(rebuilt - ddU) <= 1e-12 * (1 + abs(ddU))


def test_polar_needs_positive_amplitude():
    with pytest.raises(R.PolarSingular):
        R.PolarState(0.0, 0.0, 0.0, 0.0)


# first integrals ----------------------------------------------------------------

def test_c1_real_data_is_zero():
    assert R.first_integral_C1(Parameters(3, 2, 1), TRANS0, 1.3, 0.4, -0.2) == 0


@pytest.mark.parametrize("sign", [1, -1])
def test_t25_first_integral(sign):
    from radial_nls.catalog import FamilyConstants, instantiate
    from radial_nls.verify import profile_first_integral
    P = Parameters(1, -4, 2)
    s = instantiate("T25", P, FamilyConstants.from_mapping(dict(c1=0.1, c2=0.5, c3=1.5), [sign]))
    vals = [profile_first_integral(P, TRANS0, s, SpacetimePoint(0.0, r)) for r in (0.3, 1, 2, 4)]
    assert max(abs(v + sign * math.sqrt(2)) for v in vals) <= 1e-9


def test_level_set_linear_case():
    P = Parameters(4, -1, 2)
    ls = R.level_set_ode(P, TRANS0, 0.0)
    assert ls.linear
    assert fd_residual(lambda x: 1 - x * x / 4, as_ode(ls.rhs), [0.3, 0.9, 1.5]) <= 1e-9
    lss = R.level_set_ode(Parameters(-4, -1, 1), SubgroupSpec("scal_phase", 0.0), 0.0)
    assert lss.linear


def test_level_set_centrifugal_term():
    n, C1 = 3.0, 0.7
    P = Parameters(n, 2, 1)
    a = R.level_set_ode(P, TRANS0, C1).rhs(1.5, 0.8, 0.1)
    b = R.level_set_ode(P, TRANS0, 0.0).rhs(1.5, 0.8, 0.1)
    assert abs((a - b) - C1 ** 2 * 1.5 ** (2 - 2 * n) * 0.8 ** -3) <= 1e-14


# integrator ---------------------------------------------------------------------

def test_cosine():
    tr = R.integrate_ode(lambda x, y, dy: -y, 0.0, 1.0, 0.0, math.pi, tol=1e-12,
                         singular_points=())
    assert abs(tr.y[-1, 0] + 1) <= 1e-9


def test_t02_initial_value_problem():
    ode = R.reduced_ode(Parameters(3, 4, 3), TRANS0)
    x0 = 0.1
    tr = R.integrate_reduced(ode, x0, (1 + x0 * x0) ** -0.5, -x0 * (1 + x0 * x0) ** -1.5, 2.0)
    assert abs(tr.y[-1, 0] - 5 ** -0.5) <= 1e-7


def test_straddling_singular_point():
    ode = R.reduced_ode(Parameters(3, 4, 3), TRANS0)
    with pytest.raises(R.IntegrationError) as e:
        R.integrate_reduced(ode, -1.0, 1.0, 0.0, 1.0)
    assert e.value.last_xi == -1.0


def test_samples_hit_exactly():
    xs = [0.25, 0.5, 1.0]
    tr = R.integrate_ode(lambda x, y, dy: -y, 0.0, 1.0, 0.0, 1.0, samples=xs,
                         singular_points=())
    assert list(tr.xi) == xs
    assert not tr.xi.flags.writeable


@given(st.floats(0.2, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_harmonic_oscillator_energy(w, y0, v0):
    tr = R.integrate_ode(lambda x, y, dy: -w * w * y, 0.0, y0, v0, 5.0, tol=1e-11,
                         singular_points=())
    e0 = v0 * v0 + w * w * y0 * y0
    e1 = tr.dy[-1, 0] ** 2 + w * w * tr.y[-1, 0] ** 2
    assert abs(e1 - e0) <= 1e-8 * (1 + e0)


SUBGROUP_CASES = [
    (SubgroupSpec("trans_phase", 0.7), Parameters(3, 2, 1)),
    (SubgroupSpec("scal_phase", 0.3), Parameters(2, 2, 1)),
    (SubgroupSpec("conf_phase", 0.5), Parameters(2, 2, -1)),
]


@pytest.mark.parametrize("sg,params", SUBGROUP_CASES)
def test_polar_equivalence_and_drift(sg, params):
    ode = R.reduced_ode(params, sg)
    s0 = R.PolarState(0.9, 0.2, 0.1, 0.4)
    xs = list(np.geomspace(0.5, 5.0, 10))
    cx = R.integrate_reduced(ode, 0.5, s0.U, s0.dU, 5.0, 1e-10, xs)
    po = R.integrate_polar(ode, 0.5, s0, 5.0, 1e-10, xs)
    for (A, P), U in zip(po.y, cx.y[:, 0]):
        assert abs(U - A * cmath.exp(1j * P)) <= 1e-7
    c = [R.first_integral_C1(params, sg, x, A * cmath.exp(1j * P),
                             (dA + 1j * A * dP) * cmath.exp(1j * P))
         for x, (A, P), (dA, dP) in zip(po.xi, po.y, po.dy)]
    assert max(abs(v - c[0]) for v in c) <= 1e-7 * (1 + abs(c[0]))


@pytest.mark.parametrize("sg,params", SUBGROUP_CASES)
def test_level_set_consistency(sg, params):
    ode = R.reduced_ode(params, sg)
    s0 = R.PolarState(0.9, 0.2, 0.1, 0.4)
    C1 = R.first_integral_C1(params, sg, 0.5, s0.U, s0.dU)
    ls = R.level_set_ode(params, sg, C1)
    xs = list(np.linspace(0.5, 3.0, 6))
    po = R.integrate_polar(ode, 0.5, s0, 3.0, 1e-11, xs)
    amp = R.integrate_ode(ls.rhs, 0.5, s0.A, s0.dA, 3.0, 1e-11, xs)
    from scipy.interpolate import CubicSpline
    fine = np.linspace(0.5, 3.0, 400)
    dense = R.integrate_ode(ls.rhs, 0.5, s0.A, s0.dA, 3.0, 1e-11, list(fine))
    Aint = CubicSpline(dense.xi, dense.y[:, 0])
    from radial_nls.specfun import adaptive_simpson
    for x, (A, P), a in zip(xs, po.y, amp.y[:, 0]):
        phi = s0.Phi + adaptive_simpson(lambda v: ls.phase_rate(v, float(Aint(v))), 0.5, x,
                                        1e-10).real
        assert abs(A - a) <= 1e-6 and abs(P - phi) <= 1e-6


# charts -----------------------------------------------------------------------------

def test_scaling_chart_values():
    ch = R.canonical_chart(Parameters(3, 2, 1), "scaling")
    z, V = ch.forward(math.e, 1.0)
    assert abs(z - 1) <= 1e-15 and abs(V - math.e ** (2 / 2)) <= 1e-15


@pytest.mark.parametrize("params,which,C1,xis", [
    (Parameters(3, 2, 1), "scaling", 0.0, [0.3, 1.0, 4.0]),
    (Parameters(4, -1, 1), "dilation", 0.0, [0.5, 2.0]),
    (Parameters(4 / 3, -4, 1), "hidden3", 1.0, [0.1, 0.5, 0.9]),
    (Parameters(0, -4, 1), "hidden4", 1.0, [1.5, 3.0, 9.0]),
    (Parameters(16, 1, 1), "hidden5", 0.0, [0.5, 2.0]),
    (Parameters(13 / 3, 1, 1), "hidden6", 0.0, [0.5, 2.0]),
])
def test_chart_round_trip(params, which, C1, xis):
    ch = R.canonical_chart(params, which, C1)
    for x in xis:
        xb, Ab = ch.inverse(*ch.forward(x, 0.7))
        assert abs(xb - x) <= 1e-12 * max(1, x) and abs(Ab - 0.7) <= 1e-12


def test_dilation_gate():
    with pytest.raises(R.ChartConstraint):
        R.canonical_chart(Parameters(3, 2, 1), "dilation")


def test_scaling_two_paths():
    P = Parameters(3, 2, 1)
    ode = R.reduced_ode(P, TRANS0)
    ch = R.canonical_chart(P, "scaling")
    xi0, U0, dU0 = 1.0, 0.8, -0.3
    xs = [1.5, 2.0, 3.0, 4.0, 5.0]
    direct = R.integrate_reduced(ode, xi0, U0, dU0, 5.0, 1e-12, xs)
    z0, V0 = ch.forward(xi0, U0)
    dV0 = xi0 * (xi0 ** (2 / P.p - 1) * (2 / P.p) * U0 + xi0 ** (2 / P.p) * dU0)
    chart = R.integrate_ode(ch.transformed_rhs, z0, V0, dV0, math.log(5.0), 1e-12,
                            [math.log(x) for x in xs], singular_points=())
    for z, V, U in zip(chart.xi, chart.y[:, 0], direct.y[:, 0]):
        assert abs(ch.inverse(z, V.real)[1] - U.real) <= 1e-8


def test_hidden3_invariant_needs_negative_k():
    # the transformed equation has B = (-12k)^(1/4) only for k < 0, where the chart
    # itself is not real; see the notes
    with pytest.raises(R.ChartConstraint):
        R.canonical_chart(Parameters(4 / 3, -4, -1), "hidden3", 1.0)
    ch = R.canonical_chart(Parameters(4 / 3, -4, 1), "hidden3", 1.0)
    assert ch.invariant_solution is None
    k = -0.5
    B = (-12 * k) ** 0.25
    assert abs(B / 3 + 4 * k * B ** -3) <= 1e-15


def test_lemma_branches():
    assert R.lemma_invariant_amplitude(0.0, -2.0, 1.0, 2.0)["branch"] == "generic"
    odd = R.lemma_invariant_amplitude(0.0, 2.0, 1.0, 1.0)
    assert odd["branch"] == "odd_numerator" and odd["signed_root"] == -2.0
    assert R.lemma_invariant_amplitude(0.0, 2.0, 1.0, 2.0)["branch"] == "none"


# closed-form reduced solutions ----------------------------------------------------

def test_scaling_invariant_profile():
    P = Parameters(5, 1, 1)
    U = R.scaling_invariant_profile(P)
    assert abs(U(2.0) - 0.5) <= 1e-15
    ls = R.level_set_ode(P, TRANS0, 0.0)
    assert fd_residual(U, as_ode(ls.rhs), [0.5, 1.0, 2.0]) <= 1e-6


@pytest.mark.parametrize("which,params", [
    ("hidden5", Parameters(16, 1, 1)), ("hidden5-inv", Parameters(16, 1, 1)),
    ("hidden6", Parameters(13 / 3, 1, 1)), ("hidden6-inv", Parameters(13 / 3, 1, 1)),
])
def test_hidden_profiles_solve_level_set(which, params):
    A = R.hidden_profiles(params, which, C3=0.8, sign=1)
    ls = R.level_set_ode(params, TRANS0, 0.0)
    assert fd_residual(A, as_ode(ls.rhs), list(np.linspace(0.5, 3, 8))) <= 1e-6


def test_hidden4_invariant_solution():
    P = Parameters(0, -4, 2)
    C1 = 0.5
    A, Phi = R.hidden4_invariant(P, C1)
    ls = R.level_set_ode(P, TRANS0, C1)
    xs = list(np.linspace(0.4, 2.5, 8))  # inside k - C1^2 xi^2 > 0
    assert fd_residual(A, as_ode(ls.rhs), xs) <= 1e-6
    h = 1e-5
    for x in xs:
        dPhi = (Phi(x + h) - Phi(x - h)) / (2 * h)
        assert abs(dPhi - ls.phase_rate(x, A(x))) <= 1e-6 * (1 + abs(dPhi))


@pytest.mark.parametrize("n", [3, 2, 0, 2.5])
@pytest.mark.parametrize("nu", [0.7, -0.4, 0.0])
def test_linear_trans_closed_forms(n, nu):
    P = Parameters(n, -1, 1.3)
    xs = list(np.linspace(0.6, 3, 20))
    A = R.linear_trans_solution(P, nu, 0.6, -0.4)
    assert fd_residual(A, R.linear_trans_ode(P, nu), xs) <= 1e-6


def test_linear_whittaker_closed_forms():
    P = Parameters(-4, -1, 1.0)
    xs = list(np.linspace(0.6, 3, 20))
    assert fd_residual(R.linear_scal_solution(P, 0.0, 0.5, 0.3), R.linear_scal_ode(P, 0.0),
                       xs) <= 1e-6
    for kappa in (0.0, 2.0):
        assert fd_residual(R.linear_conf_solution(P, kappa, 0.5, 0.3),
                           R.linear_conf_ode(P, kappa), xs) <= 1e-6


# blow-up ----------------------------------------------------------------------------

CRIT = R.BlowupSpec("critical", -1.0, 1.0)
P22 = Parameters(2, 2, 1)


def test_critical_constant_profile():
    c = R.blowup_constant_profile(P22, CRIT)
    assert c == 1.0
    assert R.blowup_ode(P22, CRIT)(1.3, c, 0.0) == 0


def test_supercritical_constant_not_solution():
    P = Parameters(3, 2, 1)
    rhs = R.blowup_ode(P, R.BlowupSpec("supercritical", -1.0, 1.0))
    assert abs(rhs(1.0, 1.0, 0.0).imag) > 0.1
    with pytest.raises(ConstraintError):
        R.blowup_ode(Parameters(2, 1, 1), R.BlowupSpec("supercritical", -1.0, 1.0))


def test_critical_gate():
    with pytest.raises(ConstraintError):
        R.blowup_ode(Parameters(3, 2, 1), CRIT)


def test_blowup_field():
    s = R.blowup_solution(P22, CRIT, lambda x: 1.0)
    for t in (0.9, 0.99):
        assert abs(abs(s(t, 1.0)) - 1 / (1 - t)) <= 1e-9 / (1 - t)
    pts = [SpacetimePoint(t, r) for t in np.linspace(0, 0.5, 5) for r in (0.5, 2.0)]
    assert pde_residual(P22, s, pts, 1e-6).passed
    with pytest.raises(R.PastBlowup):
        R.blowup_reconstruct(P22, CRIT, lambda x: 1.0, 1.0, 1.0)


def test_trajectory_csv_format():
    tr = R.integrate_ode(lambda x, y, dy: -y, 1.0, 1.0 + 0j, 0j, 2.0, samples=[1.0, 2.0],
                         singular_points=())
    text = R.trajectory_csv(R.trajectory_rows(Parameters(3, 2, 1), TRANS0, tr))
    lines = text.split("\n")
    assert lines[0] == "xi,u_re,u_im,a,phi,c1" and lines[1].startswith("1.0,1.0,0.0,1.0,0.0,")
    assert "\r" not in text
