import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowflow.riemann import hll_flux, physical_flux, transverse_flux, upwind_transverse, wave_speeds

G = 9.81
wet = st.floats(1e-3, 20.0)
vel = st.floats(-20.0, 20.0)


def test_wave_speeds_zero_depth():
    assert wave_speeds(0.0, 0.0, 0.0, 0.0, G) == (0.0, 0.0)


def test_wave_speeds_symmetric_still_water():
    c1, c2 = wave_speeds(1.0, 0.0, 1.0, 0.0, G)
    assert c1 == -c2 == -math.sqrt(G)


def test_still_water_flux():
    flux = hll_flux(1.0, 0.0, 1.0, 0.0, G)
    assert (flux.f_h, flux.f_q) == (0.0, 4.905)


def test_supercritical_flux_takes_left_state():
    flux = hll_flux(1.0, 10.0, 1.0, 10.0, G)
    assert (flux.f_h, flux.f_q) == (10.0, 104.905)


def test_dry_interface_has_no_flux():
    flux = hll_flux(0.0, 0.0, 0.0, 0.0, G)
    assert (flux.f_h, flux.f_q, flux.max_speed) == (0.0, 0.0, 0.0)


@given(wet, vel)
def test_consistency(h, u):
    flux = hll_flux(h, u, h, u, G)
    f_h, f_q = physical_flux(h, u, G)
    assert flux.f_h == f_h and flux.f_q == f_q


@given(wet, vel, wet, vel)
def test_mirror_symmetry(hL, uL, hR, uR):
    a = hll_flux(hL, uL, hR, uR, G)
    b = hll_flux(hR, -uR, hL, -uL, G)
    scale = max(1.0, abs(hL * uL), abs(hR * uR), math.sqrt(G * max(hL, hR)) * max(hL, hR))
    assert a.f_h == pytest.approx(-b.f_h, abs=1e-12 * scale)
    assert a.f_q == pytest.approx(b.f_q, rel=1e-12, abs=1e-12 * scale)


@given(st.floats(0.0, 20.0), vel, st.floats(0.0, 20.0), vel)
def test_flux_is_finite_on_dry_and_wet_states(hL, uL, hR, uR):
    flux = hll_flux(hL, uL, hR, uR, G)
    assert np.isfinite(flux.f_h) and np.isfinite(flux.f_q)


def test_vectorised_matches_scalar():
    hL = np.array([1.0, 0.0, 2.0])
    uL = np.array([0.5, 0.0, -1.0])
    hR = np.array([0.5, 1.0, 2.0])
    uR = np.array([0.0, 0.0, 3.0])
    vec = hll_flux(hL, uL, hR, uR, G)
    for k in range(3):
        s = hll_flux(hL[k], uL[k], hR[k], uR[k], G)
        assert (vec.f_h[k], vec.f_q[k]) == (s.f_h, s.f_q)


@pytest.mark.parametrize("f_h, vL, vR, expected", [(0.0, 0.0, 0.0, 0.0), (0.0, 3.0, -1.0, 0.0),
                                                   (2.0, 3.0, -1.0, 6.0), (-2.0, 3.0, -1.0, 2.0)])
def test_upwind_transverse(f_h, vL, vR, expected):
    assert upwind_transverse(f_h, vL, vR) == expected


def test_transverse_flux_zero_without_transverse_velocity():
    _, _, f_t = transverse_flux(1.0, 0.3, 0.0, 0.8, 0.1, 0.0, G)
    assert f_t == 0.0
