import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shallowflow.hydrology import (InfiltrationState, RainfallForcing, SoilParameters, infiltrate,
                                   infiltrated_depth, infiltration_capacity, infiltration_rate, mm_per_hour,
                                   rainfall_at)

PLOT_SOIL = SoilParameters(Ks=4.4e-6, hf=0.06, dtheta=0.12)
RAIN = RainfallForcing(((0.0, 70 / 3.6e6), (7200.0, 0.0)))


def test_rain_during_and_after_event():
    assert rainfall_at(RAIN, 3600.0) == 70 / 3.6e6
    assert rainfall_at(RAIN, 7201.0) == 0.0
    assert rainfall_at(RainfallForcing(), 12.0) == 0.0


def test_rain_before_first_breakpoint_is_zero():
    assert rainfall_at(RainfallForcing(((10.0, 1e-5),)), 5.0) == 0.0


def test_rain_breakpoint_lookup():
    forcing = RainfallForcing(((0.0, 1.0), (5.0, 2.0), (8.0, 0.0)))
    assert [rainfall_at(forcing, t) for t in (0.0, 4.999, 5.0, 7.0, 8.0)] == [1.0, 1.0, 2.0, 2.0, 0.0]
    assert forcing.next_breakpoint(5.0) == 8.0
    assert forcing.next_breakpoint(9.0) == math.inf


def test_rain_file_is_in_mm_per_hour(tmp_path):
    path = tmp_path / "rain.txt"
    path.write_text("# t mm/h\n0 70\n7200 0\n")
    assert RainfallForcing.from_file(path) == RAIN
    assert mm_per_hour(70.0) == 70 / 3.6e6


@pytest.mark.parametrize("content, message", [("0 1 2\n", "expected"), ("0 x\n", "unparsable"),
                                              ("5 1\n2 1\n", "increasing"), ("0 -1\n", ">= 0")])
def test_rain_file_errors(tmp_path, content, message):
    path = tmp_path / "rain.txt"
    path.write_text(content)
    with pytest.raises(ValueError, match=message):
        RainfallForcing.from_file(path)


def test_soil_validation():
    with pytest.raises(ValueError, match="dtheta"):
        SoilParameters(1e-6, 0.1, 0.0)
    SoilParameters(0.0, 0.1, 0.0)  # impermeable soil ignores dtheta


def test_capacity_of_plot_soil():
    assert infiltration_capacity(PLOT_SOIL, 1.2e-3, 0.0) == pytest.approx(4.4e-6 * 7, rel=1e-15)


def test_capacity_impermeable():
    assert infiltration_capacity(SoilParameters(0.0, 0.06, 0.12), 1e-3, 0.0) == 0.0


def test_capacity_tends_to_ks():
    assert infiltration_capacity(PLOT_SOIL, 1e6, 0.0) == pytest.approx(4.4e-6, rel=1e-9)


def test_capacity_unbounded_before_any_infiltration():
    assert infiltration_capacity(PLOT_SOIL, 0.0, 0.3) == math.inf
    assert infiltrate(PLOT_SOIL, 0.0, 0.002, 2.0) == (0.001, 0.002)


def test_capacity_clamped_at_zero():
    assert infiltration_capacity(PLOT_SOIL, 1e-3, 5.0) == 0.0


def test_infiltrate_dry_surface():
    rate, V = infiltrate(PLOT_SOIL, 1.2e-3, 0.0, 1.0)
    assert rate == 0.0 and V == 1.2e-3


def test_infiltration_rate_branches():
    assert infiltration_rate(3.08e-5, 1.0, 1.0) == 3.08e-5
    assert infiltration_rate(3.08e-5, 1e-6, 1.0) == 1e-6
    assert infiltration_rate(math.inf, 2e-3, 0.5) == 4e-3


soil_strategy = st.builds(SoilParameters, Ks=st.floats(0.0, 1e-4), hf=st.floats(0.0, 0.5),
                          dtheta=st.floats(0.01, 1.0))


@given(soil_strategy, st.floats(0.0, 0.5), st.floats(0.0, 1.0), st.floats(1e-3, 100.0))
def test_never_infiltrates_more_than_present(soil, V, h, dt):
    depth = infiltrated_depth(soil, V, h, dt)
    assert 0.0 <= depth <= h
    rate, new_V = infiltrate(soil, V, h, dt)
    assert new_V >= V


@given(soil_strategy, st.floats(1e-6, 0.5), st.floats(1e-6, 0.5))
def test_capacity_nonincreasing_in_infiltrated_depth(soil, V1, V2):
    lo, hi = sorted((V1, V2))
    h = 0.5 * soil.hf
    assert infiltration_capacity(soil, hi, h) <= infiltration_capacity(soil, lo, h) * (1 + 1e-15)


@given(st.floats(0.0, 1.0), st.floats(1e-3, 100.0))
def test_impermeable_soil_is_a_no_op(h, dt):
    assert infiltrated_depth(SoilParameters(0.0, 0.06, 0.12), 0.01, h, dt) == 0.0


def test_array_inputs():
    V = np.array([0.0, 1.2e-3, 1.2e-3])
    h = np.array([0.01, 0.0, 1e-3])
    cap = infiltration_capacity(PLOT_SOIL, V, h)
    assert cap[0] == math.inf and cap[1] == pytest.approx(3.08e-5)
    state = InfiltrationState.zeros((2, 3))
    assert state.wetting_front_depth(PLOT_SOIL).shape == (2, 3)
