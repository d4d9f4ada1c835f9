import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from shallowflow.grid import (NGHOST, FlowState, MassLedger, PhysicalConstants, StructuredGrid,
                              Topography, primitive_velocity, total_water_volume)


@pytest.mark.parametrize("h, q, expected", [(2.0, 6.0, 3.0), (0.0, 0.0, 0.0), (1e-15, 1e-13, 0.0)])
def test_primitive_velocity_examples(h, q, expected):
    assert primitive_velocity(h, q, 1e-12) == expected


def test_primitive_velocity_is_never_nan_on_arrays():
    u = primitive_velocity(np.array([0.0, 1e-13, 0.5]), np.array([0.0, 1.0, 1.0]))
    np.testing.assert_array_equal(u, [0.0, 0.0, 2.0])


@given(st.floats(1e-12, 1e3), st.floats(-1e3, 1e3))
def test_primitive_velocity_recovers_u_for_wet_cells(h, u):
    # q/h with q = h*u rounds back to u unless h*u itself lost bits
    q = h * u
    assert primitive_velocity(h, q) == q / h


def test_volume_of_uniform_depth():
    # 100 cells * 0.5 m * 0.01 m²
    grid = StructuredGrid(10, 10, 0.1, 0.1)
    assert total_water_volume(FlowState.from_interior(grid, 0.5), grid) == pytest.approx(100 * 0.5 * 0.01, rel=1e-15)


def test_volume_of_dry_state_is_zero():
    grid = StructuredGrid(4, 3, 1.0, 2.0)
    assert total_water_volume(FlowState.zeros(grid), grid) == 0.0


def test_volume_of_ramp_is_arithmetic_series():
    grid = StructuredGrid(10, 1, 1.0, 1.0)
    h = np.arange(10)[None, :] / 10
    assert total_water_volume(FlowState.from_interior(grid, h), grid) == pytest.approx(4.5, rel=1e-15)


def test_ghosts_do_not_count_toward_volume():
    grid = StructuredGrid(3, 2, 1.0, 1.0)
    state = FlowState.from_interior(grid, 1.0)
    state.h[0, :] = 100.0
    assert total_water_volume(state, grid) == 6.0


@given(arrays(float, 12, elements=st.sampled_from([0.0, 0.25, 1.5, 3.0])), st.randoms())
def test_volume_invariant_under_permutation(values, random):
    grid = StructuredGrid(4, 3, 0.5, 0.5)
    shuffled = values.copy()
    random.shuffle(shuffled)
    v1 = total_water_volume(FlowState.from_interior(grid, values.reshape(3, 4)), grid)
    v2 = total_water_volume(FlowState.from_interior(grid, shuffled.reshape(3, 4)), grid)
    assert v1 == v2


def test_grid_geometry():
    grid = StructuredGrid(4, 2, 0.5, 0.25, origin_x=10.0)
    assert grid.shape == (2, 4)
    assert grid.padded_shape == (2 + 2 * NGHOST, 4 + 2 * NGHOST)
    assert grid.cell_center(0, 0) == (10.25, 0.125)
    np.testing.assert_allclose(grid.x_centers(), [10.25, 10.75, 11.25, 11.75])
    assert len(grid.x_centers(ghosts=True)) == 4 + 2 * NGHOST
    assert grid.length_x == 2.0 and grid.length_y == 0.5
    assert not grid.is_1d and StructuredGrid(5, 1, 1.0, 1.0).is_1d


@pytest.mark.parametrize("args", [(0, 1, 1.0, 1.0), (2, 2, 0.0, 1.0), (2, 2, 1.0, -1.0)])
def test_grid_rejects_bad_geometry(args):
    with pytest.raises(ValueError):
        StructuredGrid(*args)


def test_topography_must_be_finite():
    grid = StructuredGrid(2, 1, 1.0, 1.0)
    with pytest.raises(ValueError, match="finite"):
        Topography.from_interior(grid, [[0.0, np.nan]])


def test_gravity_must_be_positive():
    assert PhysicalConstants().g == 9.81
    with pytest.raises(ValueError):
        PhysicalConstants(g=0.0)


def test_mass_ledger_residual():
    ledger = MassLedger(initial=1.0, rain=2.0, infiltrated=0.5)
    ledger.outflow["left"] = 0.25
    assert ledger.expected() == 2.25
    assert ledger.residual(2.25) == 0.0
    assert ledger.total_outflow == 0.25
