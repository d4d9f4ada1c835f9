from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from shallowflow.errors import ConfigError
from shallowflow.formats import (DemFormatError, dem_from_array, fmt, parse_config, read_dem, read_hydrograph,
                                 read_snapshot, write_dem, write_hydrograph, write_mass_balance, write_snapshot)
from shallowflow.grid import FlowState, MassLedger, StructuredGrid, Topography

HEADER = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 0.1\nNODATA_value -9999\n"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


@pytest.fixture
def dem_path(tmp_path):
    return write(tmp_path, "dem.asc", HEADER + "1 2\n3 4\n")


# -- DEM --------------------------------------------------------------------------------

def test_dem_rows_are_flipped_northward(dem_path):
    dem = read_dem(dem_path)
    assert [dem.value(0, 0), dem.value(1, 0), dem.value(0, 1), dem.value(1, 1)] == [3, 4, 1, 2]
    assert dem.grid().shape == (2, 2)


def test_dem_header_keys_are_case_insensitive(tmp_path):
    path = write(tmp_path, "dem.asc", HEADER.upper().replace("NODATA_VALUE", "nodata_value") + "1 2\n3 4\n")
    assert read_dem(path).cellsize == 0.1


@pytest.mark.parametrize("text, message, line", [
    (HEADER.replace("ncols 2", "ncols 0") + "1 2\n3 4\n", "invalid dimension", 1),
    (HEADER.replace("nrows 2", "rows 2") + "1 2\n3 4\n", "malformed header", 2),
    (HEADER + "1 2\n3\n", "wrong value count", 8),
    (HEADER + "1 2\n", "wrong value count", 7),
    (HEADER + "1 -9999\n3 4\n", "nodata inside the domain", 7),
    (HEADER + "1 a\n3 4\n", "unparsable", 7),
    (HEADER.replace("cellsize 0.1", "cellsize 0") + "1 2\n3 4\n", "cellsize", 5),
])
def test_dem_errors_are_located(tmp_path, text, message, line):
    path = write(tmp_path, "bad.asc", text)
    with pytest.raises(DemFormatError, match=message) as err:
        read_dem(path)
    assert f"{path}:{line}:" in str(err.value)


@given(arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 5)),
              elements=st.floats(-1e4, 1e4).filter(lambda v: v != -9999.0)))
def test_dem_round_trip(tmp_path_factory, z):
    path = tmp_path_factory.mktemp("dem") / "z.asc"
    write_dem(dem_from_array(z, 0.5), path)
    again = read_dem(path)
    np.testing.assert_array_equal(again.values, z)
    write_dem(again, path)
    np.testing.assert_array_equal(read_dem(path).values, z)


# -- config -----------------------------------------------------------------------------

def config_text(dem_path, extra=""):
    return f"dem_file = {dem_path}\nt_end = 10\n{extra}"


def test_minimal_config_defaults(tmp_path, dem_path):
    cfg = parse_config(write(tmp_path, "c.cfg", config_text(dem_path)))
    assert (cfg.g, cfg.cfl.order, cfg.cfl.n_cfl) == (9.81, 2, 0.5)
    assert cfg.friction.kind == "none" and cfg.soil is None
    assert (cfg.boundary.left, cfg.boundary.top) == ("wall", "wall")
    assert cfg.output_interval == 10 and cfg.outlet is None


def test_friction_requires_coefficient(tmp_path, dem_path):
    path = write(tmp_path, "c.cfg", config_text(dem_path, "friction = darcy-weisbach\n"))
    with pytest.raises(ConfigError, match=r"c.cfg:3: .*friction_coefficient"):
        parse_config(path)


def test_cfl_out_of_range(tmp_path, dem_path):
    with pytest.raises(ConfigError, match=r"cfl must be in \(0, 1\]"):
        parse_config(write(tmp_path, "c.cfg", config_text(dem_path, "cfl = 1.5\n")))


@pytest.mark.parametrize("extra, message", [
    ("colour = blue\n", "unknown key 'colour'"),
    ("order = 3\n", "order"),
    ("t_end = soon\n", "invalid value for 't_end'"),
    ("infiltration = greenampt\nKs = 1e-6\n", "requires hf, dtheta"),
    ("initial_depth = 0.1\ninitial_surface = 1\n", "only one of"),
    ("rain_file = /nonexistent/rain.txt\n", "rain_file not found"),
    ("boundary_left = periodic\n", "pair"),
    ("just words\n", "expected 'key = value'"),
])
def test_config_errors(tmp_path, dem_path, extra, message):
    with pytest.raises(ConfigError, match=message):
        parse_config(write(tmp_path, "c.cfg", config_text(dem_path, extra)))


def test_missing_mandatory_key(tmp_path, dem_path):
    with pytest.raises(ConfigError, match="mandatory key 't_end'"):
        parse_config(write(tmp_path, "c.cfg", f"dem_file = {dem_path}\n"))


def test_overrides_patch_before_validation(tmp_path, dem_path):
    path = write(tmp_path, "c.cfg", config_text(dem_path, "infiltration = greenampt\nKs = 4.4e-6\nhf = 0.06\n"
                                                          "dtheta = 0.12\n"))
    cfg = parse_config(path, ["Ks=2.2e-6"])
    assert cfg.soil.Ks == 2.2e-6
    with pytest.raises(ConfigError, match="--set:1"):
        parse_config(path, ["Ks=-1"])


def test_hash_ignores_execution_keys_and_tracks_physics(tmp_path, dem_path):
    path = write(tmp_path, "c.cfg", config_text(dem_path, "# comment\n"))
    base = parse_config(path).source_hash
    assert parse_config(path, ["workers=3", "output_dir=elsewhere"]).source_hash == base
    assert parse_config(path, ["g=9.8"]).source_hash != base


def test_input_paths_are_relative_to_the_config(tmp_path, dem_path, monkeypatch):
    case = tmp_path / "case"
    case.mkdir()
    (case / "dem.asc").write_bytes(dem_path.read_bytes())
    (case / "rain.txt").write_text("0 10\n")
    write(case, "c.cfg", "dem_file = dem.asc\nrain_file = rain.txt\nt_end = 1\noutput_dir = out\n")
    monkeypatch.chdir(tmp_path)
    cfg = parse_config("case/c.cfg")
    assert cfg.dem_file == Path("case/dem.asc") and cfg.rain_file == Path("case/rain.txt")
    assert cfg.output_dir == Path("out")


def test_initial_surface_gives_lake(tmp_path, dem_path):
    cfg = parse_config(write(tmp_path, "c.cfg", config_text(dem_path, "initial_surface = 3.5\n")))
    grid, topo, state = cfg.load_domain()
    np.testing.assert_array_equal(state.h[grid.inner], [[0.5, 0.0], [2.5, 1.5]])


def test_initial_depth_file_shape_must_match(tmp_path, dem_path):
    depth = write(tmp_path, "h.asc", HEADER.replace("ncols 2", "ncols 1") + "1\n3\n")
    cfg = parse_config(write(tmp_path, "c.cfg", config_text(dem_path, f"initial_depth_file = {depth}\n")))
    with pytest.raises(ConfigError, match="does not match"):
        cfg.load_domain()


# -- outputs ------------------------------------------------------------------------------

def test_fmt():
    assert [fmt(1.0), fmt(0.05), fmt(-0.0), fmt(1.2), fmt(1e-300)] == ["1", "0.05", "0", "1.2", "1e-300"]


def test_snapshot_single_wet_cell_line(tmp_path):
    grid = StructuredGrid(1, 1, 0.1, 0.1)
    state = FlowState.from_interior(grid, 1.0, 0.5, 0.0)
    topo = Topography.from_interior(grid, 0.2)
    path = tmp_path / "s.dat"
    write_snapshot(state, topo, grid, path, 0.0)
    lines = path.read_text().splitlines()
    assert lines == ["# t = 0", "0.05 0.05 1 0.5 0 0.2 1.2 0.5 0"]


def test_snapshot_dry_cell_has_zero_velocity(tmp_path):
    grid = StructuredGrid(2, 1, 1.0, 1.0)
    state = FlowState.from_interior(grid, [[0.0, 1e-14]], [[0.0, 1e-13]])
    path = tmp_path / "s.dat"
    write_snapshot(state, Topography.flat(grid), grid, path, 1.5, "prov")
    lines = path.read_text().splitlines()
    assert lines[:2] == ["# t = 1.5", "# prov"]
    assert len(lines) == 2 + 2
    assert "nan" not in path.read_text()
    assert lines[3].split()[3] == "0"


def test_snapshot_rows_are_separated_by_blank_lines(tmp_path):
    grid = StructuredGrid(2, 3, 1.0, 1.0)
    path = tmp_path / "s.dat"
    write_snapshot(FlowState.from_interior(grid, 1.0), Topography.flat(grid), grid, path, 0.0)
    body = path.read_text().split("\n", 1)[1]
    assert body.count("\n\n") == 2


@given(arrays(float, (3, 4), elements=st.floats(0, 1e3)), arrays(float, (3, 4), elements=st.floats(-1e3, 1e3)),
       arrays(float, (3, 4), elements=st.floats(-1e3, 1e3)))
def test_snapshot_round_trip_is_bit_exact(tmp_path_factory, h, qx, qy):
    grid = StructuredGrid(4, 3, 0.3, 0.7)
    path = tmp_path_factory.mktemp("snap") / "s.dat"
    write_snapshot(FlowState.from_interior(grid, h, qx, qy), Topography.flat(grid), grid, path, 12.25)
    data = read_snapshot(path)
    assert data["t"] == 12.25
    np.testing.assert_array_equal(data["h"], h)
    np.testing.assert_array_equal(data["qx"], qx + 0.0)
    np.testing.assert_array_equal(data["qy"], qy + 0.0)


def test_hydrograph_round_trip_and_header_only(tmp_path):
    path = tmp_path / "q.dat"
    write_hydrograph([(0.0, 0.0), (10.0, 0.04)], path, "prov")
    np.testing.assert_array_equal(read_hydrograph(path), [[0.0, 0.0], [10.0, 0.04]])
    write_hydrograph([], path)
    assert path.read_text() == "# t Q\n"
    assert read_hydrograph(path).shape == (0, 2)
    with pytest.raises(ValueError, match="monotone"):
        write_hydrograph([(2.0, 0.0), (1.0, 0.0)], path)


def test_mass_balance_report(tmp_path):
    ledger = MassLedger(initial=1.0, rain=0.5, infiltrated=0.25)
    ledger.outflow["bottom"] = 0.125
    path = tmp_path / "mb.txt"
    residual = write_mass_balance(ledger, 1.125, path, "prov")
    assert residual == 0.0
    text = path.read_text()
    for key in ("initial_volume = 1", "rain_volume = 0.5", "infiltrated_volume = 0.25", "outflow_bottom = 0.125",
                "final_volume = 1.125", "residual = 0"):
        assert key in text


def test_unwritable_output_path(tmp_path):
    with pytest.raises(OSError, match="cannot write"):
        write_hydrograph([], tmp_path / "missing" / "q.dat")
