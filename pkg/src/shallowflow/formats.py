"""Text file formats: ESRI ASCII DEMs, run configuration, snapshots, hydrographs
and the mass-balance report."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .friction import FrictionLaw
from .grid import DEFAULT_G, DEFAULT_H_DRY, FlowState, MassLedger, StructuredGrid, Topography, primitive_velocity
from .hydrology import RainfallForcing, SoilParameters
from .stepper import BoundaryCondition, CflSettings, SchemeSettings


class DemFormatError(ConfigError):
    pass


# -- DEM ----------------------------------------------------------------------

DEM_HEADER = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


@dataclass
class DemGrid:
    ncols: int
    nrows: int
    xllcorner: float
    yllcorner: float
    cellsize: float
    nodata_value: float
    values: np.ndarray  # (nrows, ncols), row j increases northward

    def grid(self) -> StructuredGrid:
        return StructuredGrid(self.ncols, self.nrows, self.cellsize, self.cellsize,
                              self.xllcorner, self.yllcorner)

    def value(self, i: int, j: int) -> float:
        return float(self.values[j, i])


def read_dem(path) -> DemGrid:
    """Read an ESRI ASCII grid; the first data row in the file is the northern edge."""
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise DemFormatError(f"{path}: cannot read DEM ({exc.strerror})") from None

    header = {}
    for k, key in enumerate(DEM_HEADER):
        lineno = k + 1
        if k >= len(lines):
            raise DemFormatError(f"{path}:{lineno}: missing header line '{key}'")
        parts = lines[k].split()
        if len(parts) != 2 or parts[0].lower() != key:
            raise DemFormatError(f"{path}:{lineno}: malformed header, expected '{key} <value>'")
        try:
            header[key] = float(parts[1])
        except ValueError:
            raise DemFormatError(f"{path}:{lineno}: unparsable value for {key}: {parts[1]!r}") from None

    for key in ("ncols", "nrows"):
        v = header[key]
        if v != int(v) or v < 1:
            raise DemFormatError(f"{path}:{DEM_HEADER.index(key) + 1}: invalid dimension {key}={parts_str(v)}")
    ncols, nrows = int(header["ncols"]), int(header["nrows"])
    if not header["cellsize"] > 0:
        raise DemFormatError(f"{path}:5: cellsize must be positive")

    rows = []
    for lineno, line in enumerate(lines[len(DEM_HEADER):], start=len(DEM_HEADER) + 1):
        if not line.strip():
            continue
        try:
            row = [float(v) for v in line.split()]
        except ValueError:
            raise DemFormatError(f"{path}:{lineno}: unparsable elevation value") from None
        if len(row) != ncols:
            raise DemFormatError(f"{path}:{lineno}: wrong value count, expected {ncols} got {len(row)}")
        rows.append((lineno, row))
    if len(rows) != nrows:
        raise DemFormatError(f"{path}:{len(lines)}: wrong value count, expected {nrows} rows got {len(rows)}")

    nodata = header["nodata_value"]
    for lineno, row in rows:
        if any(v == nodata or not np.isfinite(v) for v in row):
            raise DemFormatError(f"{path}:{lineno}: nodata inside the domain")

    values = np.array([row for _, row in rows])[::-1].copy()
    return DemGrid(ncols, nrows, header["xllcorner"], header["yllcorner"], header["cellsize"], nodata, values)


def parts_str(v: float) -> str:
    return repr(int(v)) if v == int(v) else repr(v)


def write_dem(dem: DemGrid, path) -> None:
    lines = [
        f"ncols {dem.ncols}",
        f"nrows {dem.nrows}",
        f"xllcorner {fmt(dem.xllcorner)}",
        f"yllcorner {fmt(dem.yllcorner)}",
        f"cellsize {fmt(dem.cellsize)}",
        f"NODATA_value {fmt(dem.nodata_value)}",
    ]
    for row in dem.values[::-1]:
        lines.append(" ".join(fmt(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def dem_from_array(z, cellsize: float, xllcorner: float = 0.0, yllcorner: float = 0.0,
                   nodata_value: float = -9999.0) -> DemGrid:
    """Wrap an elevation array indexed ``[j, i]`` (j northward)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    return DemGrid(z.shape[1], z.shape[0], xllcorner, yllcorner, cellsize, nodata_value, z)


# -- numbers ------------------------------------------------------------------

def fmt(x) -> str:
    """Shortest round-trip representation, without a trailing '.0' or negative zero."""
    s = repr(float(x) + 0.0)
    return s[:-2] if s.endswith(".0") else s


# -- configuration --------------------------------------------------------------

SIDE_KEYS = {"boundary_left": "left", "boundary_right": "right",
             "boundary_bottom": "bottom", "boundary_top": "top"}
OUTLETS = ("none", "left", "right", "bottom", "top")


def _positive(v):
    x = float(v)
    if not x > 0:
        raise ValueError("must be > 0")
    return x


def _nonneg(v):
    x = float(v)
    if not x >= 0:
        raise ValueError("must be >= 0")
    return x


def _choice(*options):
    def parse(v):
        if v not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return v
    return parse


def _cfl(v):
    x = float(v)
    if not 0 < x <= 1:
        raise ValueError("cfl must be in (0, 1]")
    return x


def _order(v):
    x = int(v)
    if x not in (1, 2):
        raise ValueError("order must be 1 or 2")
    return x


def _workers(v):
    x = int(v)
    if x < 1:
        raise ValueError("workers must be >= 1")
    return x


CONFIG_KEYS = {
    "dem_file": str,
    "t_end": _positive,
    "output_interval": _positive,
    "order": _order,
    "cfl": _cfl,
    "g": _positive,
    "h_dry": _positive,
    "friction": _choice("none", "darcy-weisbach", "manning"),
    "friction_coefficient": _nonneg,
    "infiltration": _choice("none", "greenampt"),
    "Ks": _nonneg,
    "hf": _nonneg,
    "dtheta": _positive,
    "rain_file": str,
    "boundary_left": _choice("wall", "neumann", "periodic"),
    "boundary_right": _choice("wall", "neumann", "periodic"),
    "boundary_bottom": _choice("wall", "neumann", "periodic"),
    "boundary_top": _choice("wall", "neumann", "periodic"),
    "initial_depth": _nonneg,
    "initial_depth_file": str,
    "initial_surface": float,
    "outlet": _choice(*OUTLETS),
    "output_dir": str,
    "dt_max": _positive,
    "workers": _workers,
}
MANDATORY = ("dem_file", "t_end")


@dataclass(frozen=True)
class SimulationConfig:
    dem_file: Path
    t_end: float
    output_interval: float
    cfl: CflSettings = field(default_factory=CflSettings)
    g: float = DEFAULT_G
    h_dry: float = DEFAULT_H_DRY
    friction: FrictionLaw = field(default_factory=FrictionLaw)
    soil: SoilParameters | None = None
    boundary: BoundaryCondition = field(default_factory=BoundaryCondition)
    initial: tuple = ("depth", 0.0)  # ("depth", h) | ("depth_file", path) | ("surface", eta)
    rain_file: Path | None = None
    output_dir: Path = Path("output")
    outlet: str | None = None
    dt_max: float | None = None
    workers: int = 1
    source_hash: str = ""

    @property
    def infiltration(self) -> bool:
        return self.soil is not None

    def scheme(self, backend: str = "numba") -> SchemeSettings:
        return SchemeSettings(g=self.g, h_dry=self.h_dry, cfl=self.cfl, friction=self.friction,
                              soil=self.soil, boundary=self.boundary, workers=self.workers,
                              backend=backend)

    def with_output_dir(self, path) -> SimulationConfig:
        return replace(self, output_dir=Path(path))

    def load_domain(self):
        """Read the DEM and initial condition; returns ``(grid, topo, state)``."""
        dem = read_dem(self.dem_file)
        grid = dem.grid()
        topo = Topography.from_interior(grid, dem.values)
        kind, value = self.initial
        if kind == "depth":
            h = np.full(grid.shape, value)
        elif kind == "surface":
            h = np.maximum(value - dem.values, 0.0)
        else:
            depth = read_dem(value)
            if depth.values.shape != dem.values.shape:
                raise ConfigError(f"{value}: initial depth grid shape {depth.values.shape} "
                                  f"does not match the DEM {dem.values.shape}")
            if np.any(depth.values < 0):
                raise ConfigError(f"{value}: initial depths must be >= 0")
            h = depth.values
        return grid, topo, FlowState.from_interior(grid, h)

    def rainfall(self) -> RainfallForcing:
        if self.rain_file is None:
            return RainfallForcing()
        try:
            return RainfallForcing.from_file(self.rain_file)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"rain_file: {exc}") from None


def _parse_lines(lines, origin, values):
    for lineno, raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{origin}:{lineno}: unknown key {key!r}")
        try:
            parsed = CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{origin}:{lineno}: invalid value for {key!r}: {value!r} ({exc})") from None
        values[key] = (parsed, f"{origin}:{lineno}")


# keys that change how a run executes or where it writes, never what it computes
EXECUTION_KEYS = ("workers", "output_dir")
FILE_KEYS = ("dem_file", "rain_file", "initial_depth_file")


def _settings_digest(values: dict) -> str:
    h = hashlib.sha256()
    for key in sorted(values):
        if key in EXECUTION_KEYS:
            continue
        value = values[key][0]
        h.update(key.encode() + b"=")
        if key in FILE_KEYS:
            h.update(hashlib.sha256(Path(value).read_bytes()).digest())
        else:
            h.update(repr(value).encode())
        h.update(b"\n")
    return h.hexdigest()


def parse_config(path, overrides=()) -> SimulationConfig:
    """Parse a ``key = value`` file; ``overrides`` are ``key=value`` strings applied on top."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    values: dict = {}
    _parse_lines(enumerate(text.splitlines(), start=1), path, values)
    _parse_lines(((f"{k + 1}", o) for k, o in enumerate(overrides)), "--set", values)

    for key in MANDATORY:
        if key not in values:
            raise ConfigError(f"{path}: missing mandatory key {key!r}")
    for key in FILE_KEYS:
        # input files are located relative to the config, outputs relative to the caller
        if key in values:
            value, origin = values[key]
            values[key] = (str(path.parent / value), origin)

    def get(key, default=None):
        return values[key][0] if key in values else default

    def where(key):
        return values[key][1]

    order = get("order", 2)
    cfl = CflSettings(order=order, n_cfl=get("cfl"))

    friction_kind = get("friction", "none")
    if friction_kind != "none" and "friction_coefficient" not in values:
        raise ConfigError(f"{where('friction')}: friction = {friction_kind} requires 'friction_coefficient'")
    friction = FrictionLaw(friction_kind, get("friction_coefficient", 0.0))

    soil = None
    if get("infiltration", "none") == "greenampt":
        missing = [k for k in ("Ks", "hf", "dtheta") if k not in values]
        if missing:
            raise ConfigError(f"{where('infiltration')}: infiltration = greenampt requires {', '.join(missing)}")
        try:
            soil = SoilParameters(get("Ks"), get("hf"), get("dtheta"))
        except ValueError as exc:
            raise ConfigError(f"{where('dtheta')}: {exc}") from None

    try:
        boundary = BoundaryCondition(**{side: get(key, "wall") for key, side in SIDE_KEYS.items()})
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    initial_keys = [k for k in ("initial_depth", "initial_depth_file", "initial_surface") if k in values]
    if len(initial_keys) > 1:
        raise ConfigError(f"{where(initial_keys[1])}: only one of {', '.join(initial_keys)} may be given")
    initial = ("depth", 0.0)
    if initial_keys == ["initial_depth"]:
        initial = ("depth", get("initial_depth"))
    elif initial_keys == ["initial_depth_file"]:
        initial = ("depth_file", Path(get("initial_depth_file")))
    elif initial_keys == ["initial_surface"]:
        initial = ("surface", get("initial_surface"))

    for key in FILE_KEYS:
        if key in values and not Path(values[key][0]).is_file():
            raise ConfigError(f"{where(key)}: {key} not found: {values[key][0]}")

    outlet = get("outlet", "none")
    digest = _settings_digest(values)
    return SimulationConfig(
        dem_file=Path(get("dem_file")),
        t_end=get("t_end"),
        output_interval=get("output_interval", get("t_end")),
        cfl=cfl,
        g=get("g", DEFAULT_G),
        h_dry=get("h_dry", DEFAULT_H_DRY),
        friction=friction,
        soil=soil,
        boundary=boundary,
        initial=initial,
        rain_file=Path(get("rain_file")) if "rain_file" in values else None,
        output_dir=Path(get("output_dir", "output")),
        outlet=None if outlet == "none" else outlet,
        dt_max=get("dt_max"),
        workers=get("workers", 1),
        source_hash=digest,
    )


# -- outputs --------------------------------------------------------------------

def _write(path, text):
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"{path}: cannot write output ({exc.strerror})") from exc


def write_snapshot(state: FlowState, topo: Topography, grid: StructuredGrid, path, t: float,
                   provenance: str | None = None, h_dry: float = DEFAULT_H_DRY) -> None:
    """One line per cell ``x y h u v z h+z qx qy``, a blank line between grid rows."""
    inner = grid.inner
    h, qx, qy, z = state.h[inner], state.qx[inner], state.qy[inner], topo.z[inner]
    u = primitive_velocity(h, qx, h_dry)
    v = primitive_velocity(h, qy, h_dry)
    xs, ys = grid.x_centers(), grid.y_centers()
    out = [f"# t = {fmt(t)}"]
    if provenance:
        out.append(f"# {provenance}")
    for j in range(grid.ny):
        if j:
            out.append("")
        for i in range(grid.nx):
            out.append(" ".join(fmt(val) for val in (
                xs[i], ys[j], h[j, i], u[j, i], v[j, i], z[j, i], h[j, i] + z[j, i], qx[j, i], qy[j, i])))
    _write(path, "\n".join(out) + "\n")


SNAPSHOT_COLUMNS = ("x", "y", "h", "u", "v", "z", "eta", "qx", "qy")


def read_snapshot(path) -> dict:
    """Parse a snapshot back into ``(ny, nx)`` arrays keyed by column name, plus ``t``."""
    t = None
    rows, row = [], []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# t ="):
            t = float(line.split("=", 1)[1])
            continue
        if line.startswith("#"):
            continue
        if not line.strip():
            if row:
                rows.append(row)
            row = []
            continue
        row.append([float(v) for v in line.split()])
    if row:
        rows.append(row)
    data = np.array(rows)
    out = {name: data[..., k] for k, name in enumerate(SNAPSHOT_COLUMNS)}
    out["t"] = t
    return out


def write_hydrograph(record, path, provenance: str | None = None) -> None:
    """Two columns ``t Q`` [s, m³/s]; ``record`` is a sequence of ``(t, Q)`` pairs."""
    out = ["# t Q"]
    if provenance:
        out.append(f"# {provenance}")
    last = -np.inf
    for t, q in record:
        if t < last:
            raise ValueError("hydrograph times must be monotone")
        last = t
        out.append(f"{fmt(t)} {fmt(q)}")
    _write(path, "\n".join(out) + "\n")


def read_hydrograph(path) -> np.ndarray:
    rows = [[float(v) for v in line.split()] for line in Path(path).read_text().splitlines()
            if line.strip() and not line.startswith("#")]
    return np.array(rows).reshape(-1, 2)


def write_mass_balance(ledger: MassLedger, final_volume: float, path, provenance: str | None = None) -> float:
    """Write the volume budget and return the closure residual
    ``final - (initial + rain - infiltrated - outflow)`` [m³]."""
    residual = ledger.residual(final_volume)
    out = ["# mass balance [m3]"]
    if provenance:
        out.append(f"# {provenance}")
    out += [
        f"initial_volume = {fmt(ledger.initial)}",
        f"rain_volume = {fmt(ledger.rain)}",
        f"infiltrated_volume = {fmt(ledger.infiltrated)}",
    ]
    out += [f"outflow_{side} = {fmt(v)}" for side, v in ledger.outflow.items()]
    out += [
        f"outflow_total = {fmt(ledger.total_outflow)}",
        f"final_volume = {fmt(final_volume)}",
        f"residual = {fmt(residual)}",
    ]
    _write(path, "\n".join(out) + "\n")
    return residual
