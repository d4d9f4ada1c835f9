import numpy as np
import pytest

from shallowflow.cases import write_lake, write_rain_box, write_tilted_plane
from shallowflow.errors import NumericalError
from shallowflow.formats import parse_config, read_hydrograph, read_snapshot
from shallowflow.grid import FlowState, StructuredGrid, Topography
from shallowflow.hydrology import RainfallForcing
from shallowflow.simulation import Simulation, build_simulation, run_config
from shallowflow.stepper import BoundaryCondition, SchemeSettings
from shallowflow.hydrology import SoilParameters


def test_lake_run_is_still(tmp_path):
    cfg = parse_config(write_lake(tmp_path, n=20, t_end=10.0))
    summary = run_config(cfg, quiet=True)
    assert summary.final_time == 10.0
    assert abs(summary.residual) <= 1e-12
    snap = read_snapshot(tmp_path / "out" / "snapshot_00002.dat")
    assert np.max(np.abs(snap["qx"])) <= 1e-13 and np.max(np.abs(snap["qy"])) <= 1e-13
    assert read_hydrograph(tmp_path / "out" / "hydrograph.dat").shape == (0, 2)


def test_rain_on_impermeable_box_closes_volume(tmp_path):
    cfg = parse_config(write_rain_box(tmp_path, t_end=300.0, output_interval=100.0, Ks=0.0))
    sim = build_simulation(cfg)
    sim.run(cfg.t_end, cfg.output_interval)
    rain = 70 / 3.6e6 * 300.0 * 40.0
    assert sim.ledger.rain == pytest.approx(rain, rel=1e-12)
    assert sim.volume() == pytest.approx(rain, rel=1e-10)
    assert sim.steps >= 100


def test_infiltration_only_on_ponded_water(tmp_path):
    grid = StructuredGrid(6, 4, 0.5, 0.5)
    soil = SoilParameters(4.4e-6, 0.06, 0.12)
    sim = Simulation(grid, Topography.flat(grid), FlowState.from_interior(grid, 0.05),
                     SchemeSettings(soil=soil), dt_max=1.0)
    start = sim.volume()
    sim.advance_to(200.0)
    assert sim.ledger.infiltrated > 0
    assert sim.volume() + sim.ledger.infiltrated == pytest.approx(start, rel=1e-10)


def test_time_lands_on_outputs_and_breakpoints():
    grid = StructuredGrid(4, 1, 1.0, 1.0)
    forcing = RainfallForcing(((0.0, 1e-5), (0.7, 0.0)))
    sim = Simulation(grid, Topography.flat(grid), FlowState.from_interior(grid, 1.0), SchemeSettings(), forcing)
    times = []
    sim.run(1.0, 0.25, lambda s: times.append(s.time))
    assert times == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert sim.ledger.rain == pytest.approx(0.7 * 1e-5 * 4, rel=1e-12)


def test_uniform_outflow_discharge():
    # q = 0.01 m²/s leaving a 4 m wide side
    grid = StructuredGrid(4, 3, 1.0, 1.0)
    state = FlowState.from_interior(grid, 1.0, 0.0, -0.01)
    bc = BoundaryCondition(bottom="neumann", top="neumann")
    sim = Simulation(grid, Topography.flat(grid), state, SchemeSettings(boundary=bc), outlet="bottom")
    assert sim.outlet_discharge() == pytest.approx(0.04, rel=1e-12)


def test_closed_lake_has_zero_outlet_discharge(tmp_path):
    cfg = parse_config(write_lake(tmp_path, n=10, t_end=2.0, outlet="left"))
    run_config(cfg, quiet=True)
    q = read_hydrograph(tmp_path / "out" / "hydrograph.dat")
    assert len(q) == 3 and np.all(np.abs(q[:, 1]) <= 1e-13)


def test_numerical_failure_names_the_step():
    grid = StructuredGrid(4, 1, 1.0, 1.0)
    state = FlowState.from_interior(grid, 1.0)
    state.qx[2, 3] = np.inf
    sim = Simulation(grid, Topography.flat(grid), state, SchemeSettings())
    with pytest.raises(NumericalError, match=r"step 1 \(t=0\).*cell"):
        sim.step()


def test_tilted_plane_drains_through_outlet(tmp_path):
    cfg = parse_config(write_tilted_plane(tmp_path, t_end=300.0, output_interval=100.0, width=1.0, length=2.0))
    summary = run_config(cfg, quiet=True)
    q = read_hydrograph(tmp_path / "out" / "hydrograph.dat")
    assert q[-1, 1] > 0
    assert abs(summary.residual) <= 1e-10 * (70 / 3.6e6 * 300 * 2.0)
