import numpy as np
import pytest
from hypothesis import given, strategies as st

from mwfzp.potentials import (FAR_FIELD_CUTOFF, CasimirParams, casimir_surface_value, casimir_vdw,
                              casimir_vdw_si, retarded_vdw_si, total_potential)
from mwfzp.units import scaling_from_beta

P = CasimirParams()
C3, L_T, LAM = 2.5e-50, 9.3e-9, 10e-9
C4 = C3 * L_T


def far(chi):
    return -C4 / ((chi + L_T) * chi ** 3)


def test_params():
    assert P.C4 == P.C3 * P.l
    with pytest.raises(ValueError):
        CasimirParams(C3=0.0)


def test_surface_value():
    expect = -C4 * (6 * LAM + 5 * L_T) / (2 * LAM ** 3 * (LAM + L_T) ** 2)
    assert casimir_surface_value(P) == pytest.approx(expect, rel=1e-14)
    assert casimir_surface_value(P) == pytest.approx(-3.32e-26, rel=2e-3)
    assert casimir_vdw_si(0.0, P) == pytest.approx(expect, rel=1e-14)
    assert casimir_surface_value(P) / 1.602176634e-19 == pytest.approx(-0.207e-6, rel=5e-3)


def test_far_branch():
    chi = np.array([1.5e-8, 5e-8, 3e-7])
    np.testing.assert_allclose(casimir_vdw_si(chi, P), far(chi), rtol=1e-14)


def test_continuity_at_cutoff():
    below = casimir_vdw_si(LAM, P)
    assert below == pytest.approx(far(LAM), rel=1e-12)
    above = casimir_vdw_si(LAM * (1 + 1e-12), P)
    assert above == pytest.approx(below, rel=1e-9)


def test_slope_continuity_at_cutoff():
    h = 1e-14
    left = (casimir_vdw_si(LAM, P) - casimir_vdw_si(LAM - h, P)) / h
    right = (casimir_vdw_si(LAM + h, P) - casimir_vdw_si(LAM * (1 + 1e-15) + 1e-30, P)) / (h - LAM * 1e-15)
    # analytic slopes of each branch
    parab = C4 / (2 * LAM ** 5 * (LAM + L_T) ** 2) * 2 * (4 * LAM + 3 * L_T) * LAM
    farslope = C4 * (4 * LAM + 3 * L_T) / ((LAM + L_T) ** 2 * LAM ** 4)
    assert parab == pytest.approx(farslope, rel=1e-12)
    assert left == pytest.approx(farslope, rel=1e-4)
    assert right == pytest.approx(farslope, rel=1e-4)


@pytest.mark.parametrize("chi", [10 * L_T, 1.01 * LAM])
def test_closed_form_near_transition(chi):
    # V chi^4 = -C4 chi/(chi+l) and V chi^3 = -C3 l/(chi+l) hold exactly
    assert casimir_vdw_si(chi, P) * chi ** 4 == pytest.approx(-C4 * chi / (chi + L_T), rel=1e-12)
    assert casimir_vdw_si(chi, P) * chi ** 3 == pytest.approx(-C3 * L_T / (chi + L_T), rel=1e-12)


def test_casimir_regime():
    chi = 50 * L_T
    assert casimir_vdw_si(chi, P) * chi ** 4 == pytest.approx(-C4, rel=0.05)


def test_van_der_waals_regime_of_long_range_form():
    chi = 0.02 * L_T
    assert retarded_vdw_si(chi, P) * chi ** 3 == pytest.approx(-C3, rel=0.05)


@given(st.floats(1.0001e-8, 1e-5), st.floats(1.0001, 3.0))
def test_far_branch_monotone_to_zero(chi, factor):
    a, b = casimir_vdw_si(chi, P), casimir_vdw_si(chi * factor, P)
    assert a < b < 0


def test_minimum_at_surface():
    chi = np.linspace(0, 5e-8, 5001)
    V = casimir_vdw_si(chi, P)
    assert np.argmin(V) == 0
    assert np.all(np.diff(V) > 0)


def test_negative_distance_rejected():
    with pytest.raises(ValueError):
        casimir_vdw_si(np.array([-1e-9]), P)
    with pytest.raises(ValueError):
        casimir_vdw(np.array([-1.0]), P, scaling_from_beta(5e-9))


def test_scaled_field_and_cutoff():
    s = scaling_from_beta(5e-9)
    chi = np.array([0.0, 1.0, 3.0, 1e6])
    W = casimir_vdw(chi, P, s)
    np.testing.assert_allclose(W[:3], casimir_vdw_si(chi[:3] * 5e-9, P) / s.V0, rtol=1e-14)
    assert W[3] == 0.0
    assert abs(casimir_vdw_si(1e6 * 5e-9, P) / s.V0) < FAR_FIELD_CUTOFF
    assert W[0] == pytest.approx(-0.993, rel=2e-3)


def test_total_potential():
    z = np.zeros((4, 5))
    np.testing.assert_array_equal(total_potential(z, z, z), z)
    g = np.ones((4, 5)) * 11.92
    c = np.full((4, 5), -0.99)
    i = np.full((4, 5), -0.1)
    tot = total_potential(g, c, i)
    np.testing.assert_allclose(tot, g + c + i)
    assert np.all(tot >= 11.92 - 0.99 - 0.1 - 1e-12)
    with pytest.raises(ValueError):
        total_potential(z, np.zeros((5, 4)), z)
