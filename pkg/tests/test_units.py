import math

import pytest
from hypothesis import given, strategies as st
from scipy import constants as sc

from mwfzp.units import (CODATA, PhysicalConstants, de_broglie_from_temperature,
                         de_broglie_from_velocity, scaling_from_beta, temperature_from_de_broglie,
                         velocity_from_de_broglie)

# Independent oracle: scipy CODATA tables with the 4He mass taken as given.
M_HE = 6.6464731e-27


def test_constants_match_codata_tables():
    assert CODATA.hbar == pytest.approx(sc.hbar, rel=1e-9)
    assert CODATA.k_B == pytest.approx(sc.k, rel=1e-12)
    assert CODATA.eps0 == pytest.approx(sc.epsilon_0, rel=1e-9)
    assert CODATA.a0 == pytest.approx(sc.physical_constants["Bohr radius"][0], rel=1e-9)
    assert CODATA.m_He == pytest.approx(4.002602 * sc.physical_constants["atomic mass constant"][0], rel=1e-6)
    assert CODATA.h == 2 * math.pi * CODATA.hbar


def test_constants_must_be_positive():
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=-1.0)


def test_scaling_for_5nm():
    s = scaling_from_beta(5e-9)
    assert s.tau == pytest.approx(3.152e-9, rel=1e-3)
    assert s.V0 / sc.electron_volt == pytest.approx(0.21e-6, rel=0.01)
    assert s.V0 * s.tau / CODATA.hbar == pytest.approx(1.0, rel=1e-12)
    assert s.beta == pytest.approx(math.sqrt(CODATA.hbar ** 2 / (2 * CODATA.m_He * s.V0)), rel=1e-12)


def test_scaling_powers():
    a, b = scaling_from_beta(5e-9), scaling_from_beta(10e-9)
    assert b.tau / a.tau == pytest.approx(4.0, rel=1e-12)
    assert b.V0 / a.V0 == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("bad", [0.0, -1e-9])
def test_scaling_rejects_non_positive(bad):
    with pytest.raises(ValueError):
        scaling_from_beta(bad)


@pytest.mark.parametrize("v, lam_nm, rel", [
    (2.0, 49.84, 1e-3),
    (4.0, 24.92, 1e-3),
    (20.0, sc.h / (M_HE * 20.0) * 1e9, 1e-7),
])
def test_de_broglie_from_velocity(v, lam_nm, rel):
    assert de_broglie_from_velocity(v) * 1e9 == pytest.approx(lam_nm, rel=rel)


@pytest.mark.parametrize("T, lam_nm, rel", [
    (0.642e-3, 49.84, 1e-3),
    (0.1e-3, sc.h / math.sqrt(3 * M_HE * sc.k * 0.1e-3) * 1e9, 1e-7),
    (0.1e-3, 126.3, 1e-3),
])
def test_de_broglie_from_temperature(T, lam_nm, rel):
    assert de_broglie_from_temperature(T) * 1e9 == pytest.approx(lam_nm, rel=rel)


def test_quarter_temperature_doubles_wavelength():
    assert de_broglie_from_temperature(1e-3 / 4) == pytest.approx(2 * de_broglie_from_temperature(1e-3), rel=1e-12)


@pytest.mark.parametrize("fn", [de_broglie_from_velocity, de_broglie_from_temperature,
                                temperature_from_de_broglie, velocity_from_de_broglie])
@pytest.mark.parametrize("bad", [0.0, -2.0])
def test_conversions_reject_non_positive(fn, bad):
    with pytest.raises(ValueError):
        fn(bad)


@given(st.floats(1e-7, 10.0))
def test_temperature_round_trip(T):
    assert temperature_from_de_broglie(de_broglie_from_temperature(T)) == pytest.approx(T, rel=1e-10)


@given(st.floats(0.01, 1e3))
def test_velocity_round_trip(v):
    assert velocity_from_de_broglie(de_broglie_from_velocity(v)) == pytest.approx(v, rel=1e-12)


@given(beta=st.floats(1e-10, 1e-6), k=st.floats(1e5, 1e10))
def test_plane_wave_energy_is_K_squared(beta, k):
    s = scaling_from_beta(beta)
    E = CODATA.hbar ** 2 * k ** 2 / (2 * CODATA.m_He)
    assert s.energy(E) == pytest.approx((k * beta) ** 2, rel=1e-12)
