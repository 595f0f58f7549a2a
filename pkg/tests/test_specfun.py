import cmath
import math
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from radial_nls.core import DomainError
from radial_nls.specfun import (BesselKind, QuadratureError, SeriesError, WhittakerAntiderivative,
                                WhittakerParams, adaptive_simpson, bessel, bessel_derivative,
                                hyp1f1, integrate_whittaker, whittaker_m)


def test_j0_near_origin():
    assert abs(bessel("J", 0, 1e-12) - 1) <= 1e-15


@pytest.mark.parametrize("x", [1.0, 2.0, 5.0])
def test_half_order_closed_form(x):
    assert abs(bessel("J", 0.5, x) - math.sqrt(2 / (math.pi * x)) * math.sin(x)) <= 1e-10


def _y0_series(x, terms=60):
    # Y0 = (2/pi)(ln(x/2) + gamma) J0 - (2/pi) sum (-1)^j H_j (x^2/4)^j / (j!)^2
    q = x * x / 4
    j0, tail, term, harm = 0.0, 0.0, 1.0, 0.0
    for j in range(terms):
        if j:
            term *= -q / (j * j)
            harm += 1 / j
        j0 += term
        tail += term * harm
    return 2 / math.pi * ((math.log(x / 2) + 0.5772156649015329) * j0 - tail)


def test_y0_against_series():
    assert abs(bessel("Y", 0, 1.0) - _y0_series(1.0)) <= 1e-10


@pytest.mark.parametrize("nu", [0, 0.5, 1.5, 3])
@pytest.mark.parametrize("x", [0.5, 1, 5, 20])
def test_wronskians(nu, x):
    jy = bessel("J", nu, x) * bessel_derivative("Y", nu, x) - bessel_derivative("J", nu, x) * bessel("Y", nu, x)
    assert abs(jy - 2 / (math.pi * x)) <= 1e-8
    ik = bessel("I", nu, x) * bessel_derivative("K", nu, x) - bessel_derivative("I", nu, x) * bessel("K", nu, x)
    assert abs(ik + 1 / x) <= 1e-8 * max(1.0, bessel("I", nu, x) * bessel("K", nu, x) * x)


def test_bessel_errors():
    with pytest.raises(DomainError):
        bessel("J", 1, 0.0)
    with pytest.raises(Exception) as e:
        bessel(BesselKind.I, 0, 1e4)
    assert e.value.kind == "range"


def test_hyp1f1_examples():
    assert hyp1f1(0.3, 1.7, 0) == 1
    z = 1 + 1j
    assert abs(hyp1f1(2.5, 2.5, z) - cmath.exp(z)) <= 1e-12
    assert abs(hyp1f1(1, 2, 0.5) - (math.exp(0.5) - 1) / 0.5) <= 1e-12


def test_hyp1f1_errors():
    with pytest.raises(DomainError):
        hyp1f1(0.5, -2, 1.0)
    assert hyp1f1(-1, -2, 1.0) == 1 + 0.5  # terminates before the pole
    with pytest.raises(SeriesError):
        hyp1f1(1, 1, 61)


cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@given(cplx, st.floats(0.3, 4), st.complex_numbers(max_magnitude=5, allow_nan=False,
                                                    allow_infinity=False))
def test_kummer_transform(a, b, z):
    lhs = hyp1f1(a, b, z)
    rhs = cmath.exp(z) * hyp1f1(b - a, b, -z)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@given(cplx, st.floats(0.3, 4), cplx)
def test_hyp1f1_against_mpmath(a, b, z):
    ref = complex(mpmath.hyp1f1(a, b, z))
    assert abs(hyp1f1(a, b, z) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_whittaker_small_z():
    wp = WhittakerParams(0, 1.5)
    assert abs(whittaker_m(wp, 1e-6) / 1e-12 - 1) <= 1e-5


def test_whittaker_elementary():
    assert abs(whittaker_m(WhittakerParams(0, 0.5), 1.0) - 2 * math.sinh(0.5)) <= 1e-12


def _ode_residual(wp, z, h=1e-3):
    f = [whittaker_m(wp, z + j * h) for j in (-2, -1, 0, 1, 2)]
    d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
    q = -0.25 + wp.kappa / z + (0.25 - wp.mu ** 2) / z ** 2
    return abs(d2 + q * f[2]) / (abs(d2) + abs(q * f[2]))


def test_whittaker_ode_example():
    assert _ode_residual(WhittakerParams(0.5, 1.5), 2.0) <= 1e-8


def test_whittaker_ode_random():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(20):
        kappa = complex(rng.uniform(-2, 2), rng.uniform(-1, 1))
        mu = rng.uniform(0.1, 2.5)
        z = cmath.rect(rng.uniform(0.5, 10), rng.uniform(-1.5, 1.5))
        worst = max(worst, _ode_residual(WhittakerParams(kappa, mu), z))
    assert worst <= 1e-7


def test_whittaker_pole():
    with pytest.raises(DomainError):
        WhittakerParams(0.2, -1.5)
    WhittakerParams(-1.0, -1.5)  # a = 0 terminates first


def test_whittaker_against_mpmath():
    for kappa, mu, z in [(0.3, 1.5, 0.25j), (-0.5j, 1.5, 2 - 1j), (1.2, 0.7, 4.0)]:
        ref = complex(mpmath.whitm(kappa, mu, z))
        assert abs(whittaker_m(WhittakerParams(kappa, mu), z) - ref) <= 1e-11 * abs(ref)


def test_simpson_polynomial():
    assert abs(adaptive_simpson(lambda x: x * x, 0, 1, 1e-12) - 1 / 3) <= 1e-12
    assert adaptive_simpson(math.sin, 1, 1, 1e-9) == 0


def test_simpson_depth_limit():
    with pytest.raises(QuadratureError):
        adaptive_simpson(lambda x: 1 / math.sqrt(abs(x - 0.3)) if x != 0.3 else 0.0, 0, 1,
                         1e-14, max_depth=8)


def test_integrate_whittaker_elementary():
    wp = WhittakerParams(0, 0.5)
    val = integrate_whittaker(wp, lambda x: x, 1.0, 2.0, 1e-12)
    assert abs(val - 4 * (math.cosh(1) - math.cosh(0.5))) <= 1e-10
    assert integrate_whittaker(wp, lambda x: x, 1.5, 1.5) == 0


def test_antiderivative_matches_direct():
    wp = WhittakerParams(-0.2j, 1.5)
    arg = lambda x: 0.25j / x  # noqa: E731
    F = WhittakerAntiderivative(wp, arg, 0.5)
    for xi in (0.3, 0.77, 1.9):
        direct = integrate_whittaker(wp, arg, 0.5, xi, 1e-13) if xi > 0.5 else \
            -integrate_whittaker(wp, arg, xi, 0.5, 1e-13)
        assert abs(F(xi) - direct) <= 1e-11
