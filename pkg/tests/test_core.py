import cmath
import math

import pytest
from hypothesis import example, given, strategies as st

from radial_nls.core import (DomainError, Grid, NumericError, ParameterError, Solution,
                             SpacetimePoint, origin_limit, partial_derivative, parse_real,
                             validate_params)


def field(f, dom=None):
    return Solution(f, dom or (lambda t, r: True), "f")


def test_validate_pseudo_conformal():
    P = validate_params(3, 4 / 3, 1)
    assert P.m == -1 and P.is_pseudo_conformal
    P = validate_params(5, 1, 1)
    assert P.m == -3 and not P.is_pseudo_conformal


@pytest.mark.parametrize("n,p,k", [(2, 0, 1), (2, 1, 0), (math.nan, 1, 1), (2, math.inf, 1)])
def test_validate_rejects(n, p, k):
    with pytest.raises(ParameterError):
        validate_params(n, p, k)


@given(st.floats(-20, 20), st.floats(-10, 10).filter(lambda x: abs(x) > 1e-6),
       st.floats(-10, 10).filter(lambda x: abs(x) > 1e-6))
def test_m_plus_n(n, p, k):
    assert validate_params(n, p, k).m == 2 - n


def test_parse_real_rational():
    assert parse_real("4/3") == 4 / 3
    assert parse_real(" -0.25 ") == -0.25


def test_point_rejects_origin():
    with pytest.raises(DomainError):
        SpacetimePoint(0.0, 0.0)


def test_grid_rules():
    assert len(list(Grid(0, 1, 3, 0.5, 2, 4))) == 12
    with pytest.raises(ParameterError):
        Grid(0, 1, 2, 0.0, 1, 2)
    with pytest.raises(ParameterError):
        Grid(1, 1, 2, 0.5, 1, 2)
    assert len(list(Grid.parse("0,0,1,1,2,3"))) == 3


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 1.7])
def test_quadratic_second_derivative(r):
    # exact in floating point only at dyadic r; at r = 1.7 the rounding of
    # r +- h leaves about 6e-10, see the notes on the radial step rule
    d = partial_derivative(field(lambda t, r: r * r), SpacetimePoint(0.3, r), "rr")
    assert abs(d - 2) <= 1e-10


def test_derivative_examples():
    d = partial_derivative(field(lambda t, r: cmath.exp(1j * t)), SpacetimePoint(0, 1), "t")
    assert abs(d - 1j) <= 1e-10
    d = partial_derivative(field(lambda t, r: 2 / r ** 2), SpacetimePoint(0, 2), "r")
    assert abs(d + 0.5) <= 1e-8


cubics = (st.lists(st.floats(-2, 2), min_size=10, max_size=10),
          st.floats(-3, 3), st.floats(0.2, 4))


def _cubic_case(c, t, r):
    def f(t, r):
        return (c[0] + c[1] * t + c[2] * r + c[3] * t * t + c[4] * t * r + c[5] * r * r
                + c[6] * t ** 3 + c[7] * t * t * r + c[8] * t * r * r + c[9] * r ** 3)

    def exact(which):
        if which == "t":
            return c[1] + 2 * c[3] * t + c[4] * r + 3 * c[6] * t * t + 2 * c[7] * t * r + c[8] * r * r
        if which == "r":
            return c[2] + c[4] * t + 2 * c[5] * r + c[7] * t * t + 2 * c[8] * t * r + 3 * c[9] * r * r
        return 2 * c[5] + 2 * c[8] * t + 6 * c[9] * r

    scale = 1 + sum(abs(x) for x in c) * (1 + abs(t) + r) ** 3
    return field(f), SpacetimePoint(t, r), exact, scale


@given(*cubics)
def test_cubic_first_derivatives_exact(c, t, r):
    s, pt, exact, scale = _cubic_case(c, t, r)
    for which in ("t", "r"):
        assert abs(partial_derivative(s, pt, which) - exact(which)) <= 1e-10 * scale


@given(*cubics)
@example([2.0] + [0.0] * 8 + [1.8183975352862003], 0.0, 0.5)
def test_cubic_second_derivative_exact(c, t, r):
    # rounding in f(r +- h) is amplified by 1/h^2; this misses 1e-10 when a
    # large constant term sits on a small second derivative
    s, pt, exact, scale = _cubic_case(c, t, r)
    assert abs(partial_derivative(s, pt, "rr") - exact("rr")) <= 1e-10 * scale


def test_richardson_order():
    s = field(lambda t, r: cmath.exp(1j * (t + r)))
    pt = SpacetimePoint(0.4, 1.3)
    exact = 1j * s(0.4, 1.3)
    errs = [abs(partial_derivative(s, pt, "r", h) - exact) for h in (1e-2, 5e-3, 2.5e-3)]
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.5


def test_stencil_leaving_domain():
    s = field(lambda t, r: r, lambda t, r: r > 1)
    with pytest.raises(DomainError):
        partial_derivative(s, SpacetimePoint(0, 1.00001), "r", 1e-3)


def test_nonfinite_evaluation():
    s = field(lambda t, r: math.nan)
    with pytest.raises(NumericError):
        partial_derivative(s, SpacetimePoint(0, 1), "r")


def test_origin_limit():
    assert abs(origin_limit(lambda r: 1 + r * r)- 1) <= 1e-5
    with pytest.raises(NumericError) as e:
        origin_limit(lambda r: 1 / r)
    assert e.value.kind == "singular_at_origin"
