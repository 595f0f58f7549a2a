import cmath
import math

import pytest

from radial_nls.catalog import FamilyConstants, instantiate, load_witnesses
from radial_nls.conserve import (applicable_rows, conservation_check, csv_rows, current,
                                 global_balance_defect, global_quantity, local_defect,
                                 modulation_balance)
from radial_nls.core import NumericError, Parameters, Solution, SpacetimePoint
from radial_nls.symmetry import NotPseudoConformal

S01_PARAMS = Parameters(3, -1, 1)


def s01():
    return instantiate("S01", S01_PARAMS, FamilyConstants.from_mapping(dict(c2=3, c3=0, nu=1)))


def t02():
    return instantiate("T02", Parameters(3, 4, 3), FamilyConstants.from_mapping(dict(c2=1), [1]))


def test_charge_flux_vanishes_for_real_fields():
    cp = current(Parameters(3, 2, 1), "charge")
    assert cp.X(0.0, 1.3, 0.7 + 0j, 0j, -0.2 + 0j) == 0


def test_charge_density_of_standing_wave():
    cp = current(S01_PARAMS, "charge")
    s = s01()
    for r in (0.3, 1.0, 1.8):
        f = abs(s(0.0, r))
        for t in (0.0, 0.4, 2.0):
            assert abs(cp.T(t, r, s(t, r), 0j, 0j) + r * r * f * f) <= 1e-12


def test_noether_reduced_level():
    cp = current(S01_PARAMS, "charge")
    s = s01()
    for r in (0.3, 0.9, 1.7):
        a = cp.T(0.2, r, s(0.2, r), 0j, 0j)
        b = cp.T(1.2, r, s(1.2, r), 0j, 0j)
        assert abs(a - b) <= 1e-12


def test_pseudo_conformal_gate():
    with pytest.raises(NotPseudoConformal):
        current(Parameters(3, 2, 1), "dilation_energy")
    assert applicable_rows(Parameters(3, 2, 1)) == ("charge", "energy")
    assert len(applicable_rows(Parameters(3, 4 / 3, 1))) == 4


def test_charge_on_standing_wave():
    pts = [SpacetimePoint(t, r) for t in (0.0, 0.5) for r in (0.3, 0.6, 0.9, 1.2, 1.5)]
    rep = conservation_check(S01_PARAMS, "charge", s01(), pts)
    assert len(rep.rows) == 10 and rep.passed


def test_energy_on_static_soliton():
    cp = current(Parameters(3, 4, 3), "energy")
    for r in (0.2, 1.0, 2.5):
        assert local_defect(cp, t02(), SpacetimePoint(0.3, r)).defect <= 1e-8


def test_pc_energy_on_dynamic_monopole():
    w = next(w for w in load_witnesses() if w.family == "I01")
    rep = conservation_check(w.params, "pc_energy", w.solution(), w.points()[:10])
    assert rep.passed, rep.max_relative


@pytest.mark.parametrize("w", load_witnesses(), ids=lambda w: w.family)
def test_every_row_on_every_witness(w):
    pts = w.points()[::4][:8]
    for row in applicable_rows(w.params):
        rep = conservation_check(w.params, row, w.solution(), pts)
        assert rep.passed, (row, rep.max_relative)


def test_synthetic_global_charge():
    s = Solution(lambda t, r: cmath.exp(1j * t), lambda t, r: True, "e^it")
    val = global_quantity(current(Parameters(2, 2, 1), "charge"), s, 0.0, 1.0, 2.0)
    assert abs(val + 1.5) <= 1e-12


def test_standing_wave_global_charge_rate():
    cp = current(S01_PARAMS, "charge")
    s = s01()
    h = 1e-3
    rate = (global_quantity(cp, s, 0.5 + h, 0.5, 1.5) - global_quantity(cp, s, 0.5 - h, 0.5, 1.5)) / (2 * h)
    assert abs(rate) <= 1e-7


# recorded value of the truncated global energy of the n = 3 soliton on [0.1, 100]
T02_ENERGY = 0.3830258750010398  # scipy quad on a plain FD density agrees to 1.2e-10


def test_t02_global_energy_finite():
    val = global_quantity(current(Parameters(3, 4, 3), "energy"), t02(), 0.0, 0.1, 100.0)
    assert math.isfinite(val)
    assert abs(val - T02_ENERGY) <= 1e-8


def test_global_balance_order():
    P = Parameters(3, -1, -1)
    s = instantiate("S01", P, FamilyConstants.from_mapping(dict(c2=0.5, c3=0.2, nu=2)))
    cp = current(P, "charge")
    d = [abs(global_balance_defect(cp, s, 0.3, 0.5, 20.0, h)) for h in (0.2, 0.1, 0.05)]
    if d[0] > 1e-9:  # otherwise already at quadrature resolution
        assert math.log2(d[0] / d[1]) >= 1 or d[1] <= 1e-9


def test_static_modulation_balance():
    # T02 is regular at the origin and static
    rep = modulation_balance(Parameters(3, 4, 3), t02(), 0.0, 2.0)
    assert abs(rep.dC_dt) <= 1e-8
    assert abs(rep.S + rep.origin_term + rep.boundary_term) <= 1e-5


def test_modulation_manufactured_linear():
    # m = 0 (n = 2), k -> 0 limit: u = e^{-i t} J0(r) solves i u_t = u_rr + u_r / r
    from scipy.special import j0, j1
    P = Parameters(2, 2, 1e-300)
    s = Solution(lambda t, r: cmath.exp(1j * t) * j0(r), lambda t, r: True, "J0")
    # i u_t = -u, and Bessel: u_rr + u_r/r = -u
    rep = modulation_balance(P, s, 0.3, 2.5)
    assert abs(rep.S) <= 1e-200 and rep.origin_term == 0
    assert abs(rep.dC_dt + rep.boundary_term) <= 1e-8
    assert abs(rep.boundary_term - 1j * 2.5 * (-j1(2.5)) * cmath.exp(0.3j)) <= 1e-8


def test_modulation_singular_origin():
    s = instantiate("T01", Parameters(5, 1, 1), FamilyConstants.from_mapping(dict(c1=0)))
    with pytest.raises(NumericError) as e:
        modulation_balance(Parameters(5, 1, 1), s, 0.0, 1.0)
    assert e.value.kind == "singular_at_origin"


def test_csv_rows():
    rep = conservation_check(S01_PARAMS, "charge", s01(), [SpacetimePoint(0, 1)])
    (row,) = csv_rows("S01", rep)
    assert row[:4] == ("S01", "charge", 0, 1)
