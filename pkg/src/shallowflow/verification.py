"""Verification scenarios run against the analytic oracles.

Each ``verify_*`` function runs at pinned resolutions and returns
``CheckResult`` records holding the measured numbers and the pass flag.
"""

from __future__ import annotations

import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cases import PLOT, write_rain_box, write_tilted_plane
from .formats import parse_config, read_hydrograph
from .friction import FrictionLaw
from .grid import FlowState, StructuredGrid, Topography
from .oracles import (error_norms, integrate_topography, lake_at_rest, manufactured_steady,
                      observed_orders, ritter_solution)
from .simulation import Simulation, run_config
from .stepper import BoundaryCondition, CflSettings, SchemeSettings, heun_step

LAKE_TOL = 1e-12
RITTER_MIN_RATE = 0.5
CONVERGENCE_MIN_RATE = {2: 1.7, 1: 0.8}


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    criterion: str = ""

    def line(self) -> str:
        nums = ", ".join(f"{k}={_show(v)}" for k, v in self.measured.items())
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {nums} [{self.criterion}]"


def _show(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:.4g}"
    return str(v)


# -- lake at rest ---------------------------------------------------------------

def lake_topography(kind: str, X, Y):
    if kind == "bump":
        # peaks above the surface: a dry island in the middle
        return 1.2 * np.exp(-50.0 * ((X - 0.5) ** 2 + (Y - 0.5) ** 2))
    if kind == "step":
        z = np.where(X > 0.5, 0.6, 0.0)
        return np.where((X > 0.7) & (Y > 0.7), 1.3, z)
    raise ValueError(f"unknown lake topography {kind!r}")


def lake_scenario(kind: str, n: int = 100, eta: float = 1.0):
    grid = StructuredGrid(n, n, 1.0 / n, 1.0 / n)
    X, Y = np.meshgrid(grid.x_centers(), grid.y_centers())
    z = lake_topography(kind, X, Y)
    h = lake_at_rest(z, eta).h(X)
    return grid, Topography.from_interior(grid, z), FlowState.from_interior(grid, h)


def run_lake(kind: str, n: int = 100, steps: int = 1000, eta: float = 1.0, backend: str = "numba"):
    grid, topo, state = lake_scenario(kind, n, eta)
    sim = Simulation(grid, topo, state, SchemeSettings(backend=backend))
    start = time.perf_counter()
    for _ in range(steps):
        sim.step()
    elapsed = time.perf_counter() - start
    h = sim.state.h[grid.inner]
    z = topo.z[grid.inner]
    wet = h > 0
    surface_dev = float(np.max(np.abs((h + z)[wet] - eta)))
    q_max = float(max(np.max(np.abs(sim.state.qx[grid.inner])), np.max(np.abs(sim.state.qy[grid.inner]))))
    return surface_dev, q_max, elapsed, sim


def verify_lake(n: int = 100, steps: int = 1000) -> list[CheckResult]:
    out = []
    for kind in ("bump", "step"):
        dev, qmax, elapsed, _ = run_lake(kind, n, steps)
        out.append(CheckResult(
            f"lake-at-rest/{kind}", dev <= LAKE_TOL and qmax <= LAKE_TOL,
            {"surface_dev": dev, "q_max": qmax, "seconds": elapsed},
            f"max|h+z-eta| <= {LAKE_TOL:g}, max|q| <= {LAKE_TOL:g}, {n}x{n}, {steps} steps"))
    return out


# -- Ritter dam break -----------------------------------------------------------

RITTER = {"h_left": 0.005, "x0": 5.0, "length": 10.0, "t_end": 6.0}


def ritter_scenario(n: int, h_left: float = RITTER["h_left"], x0: float = RITTER["x0"],
                    length: float = RITTER["length"]):
    grid = StructuredGrid(n, 1, length / n, length / n)
    x = grid.x_centers()
    h = np.where(x < x0, h_left, 0.0)[None, :]
    return grid, Topography.flat(grid), FlowState.from_interior(grid, h)


def run_ritter(n: int, t_end: float = RITTER["t_end"], order: int = 2, backend: str = "numba"):
    """Returns ``(L1 error of h, min h over all steps, any NaN seen, simulation)``."""
    grid, topo, state = ritter_scenario(n)
    scheme = SchemeSettings(cfl=CflSettings(order=order), backend=backend)
    sim = Simulation(grid, topo, state, scheme)
    h_min = float(np.min(state.h))
    finite = True
    while sim.time < t_end:
        sim.step(t_end)
        h = sim.state.h[grid.inner]
        h_min = min(h_min, float(np.min(h)))
        finite = finite and bool(np.all(np.isfinite(h)))
    exact, _ = ritter_solution(RITTER["h_left"], RITTER["x0"], scheme.g, grid.x_centers(), t_end)
    l1 = error_norms(sim.state.h[grid.inner][0], exact, grid.dx)[0]
    return l1, h_min, finite, sim


def verify_positivity(n: int = 400) -> CheckResult:
    start = time.perf_counter()
    _, h_min, finite, sim = run_ritter(n)
    elapsed = time.perf_counter() - start
    return CheckResult("positivity/ritter", h_min >= -1e-15 and finite,
                       {"h_min": h_min, "finite": finite, "steps": sim.steps, "seconds": elapsed},
                       f"min h >= -1e-15 at every step, no NaN, N={n}, t=6 s")


def verify_ritter(sizes=(200, 400, 800)) -> CheckResult:
    start = time.perf_counter()
    errors = [run_ritter(n)[0] for n in sizes]
    elapsed = time.perf_counter() - start
    rates = observed_orders(sizes, errors)
    decreasing = all(b < a for a, b in zip(errors, errors[1:]))
    passed = decreasing and bool(np.all(rates >= RITTER_MIN_RATE))
    return CheckResult("ritter-convergence", passed,
                       {"N": list(sizes), "L1": errors, "rates": list(rates), "seconds": elapsed},
                       f"L1(h) strictly decreasing, rate >= {RITTER_MIN_RATE}")


# -- manufactured steady flow -----------------------------------------------------

MANUFACTURED = {"q0": 0.5, "f": 0.26, "length": 10.0}


def manufactured_profile(x):
    return 1.0 + 0.1 * np.exp(-(x - 5.0) ** 2)


def manufactured_profile_slope(x):
    return -0.2 * (x - 5.0) * np.exp(-(x - 5.0) ** 2)


def manufactured_scenario(n: int, friction: FrictionLaw | None = None):
    """Exact steady state on n cells, ghosts included, for use with ``fixed`` boundaries."""
    friction = friction or FrictionLaw("darcy_weisbach", MANUFACTURED["f"])
    q0 = MANUFACTURED["q0"]
    z_slope, sol = manufactured_steady(q0, manufactured_profile, manufactured_profile_slope, friction,
                                       domain=(0.0, MANUFACTURED["length"]))
    d = MANUFACTURED["length"] / n
    grid = StructuredGrid(n, 1, d, d)
    xg = grid.x_centers(ghosts=True)
    rows = grid.padded_shape[0]
    topo = Topography(np.tile(integrate_topography(z_slope, xg), (rows, 1)))
    state = FlowState(np.tile(sol.h(xg), (rows, 1)), np.full(grid.padded_shape, q0),
                      np.zeros(grid.padded_shape))
    return grid, topo, state, friction


def manufactured_residual(n: int, order: int = 2, backend: str = "numba",
                          friction: FrictionLaw | None = None) -> float:
    """L1 norm of ``(U^{n+1} - U^n) / dt`` over one step started from the exact steady state."""
    grid, topo, state, friction = manufactured_scenario(n, friction)
    scheme = SchemeSettings(cfl=CflSettings(order=order), friction=friction, backend=backend,
                            boundary=BoundaryCondition("fixed", "fixed", "wall", "wall"))
    result = heun_step(state, topo, grid, scheme)
    inner = grid.inner
    rh = (result.state.h[inner] - state.h[inner]) / result.dt
    rq = (result.state.qx[inner] - state.qx[inner]) / result.dt
    return error_norms(rh, 0.0, grid.dx)[0] + error_norms(rq, 0.0, grid.dx)[0]


def verify_convergence(sizes=(100, 200, 400), orders=(2, 1)) -> list[CheckResult]:
    out = []
    for order in orders:
        start = time.perf_counter()
        errors = [manufactured_residual(n, order) for n in sizes]
        rates = observed_orders(sizes, errors)
        threshold = CONVERGENCE_MIN_RATE[order]
        out.append(CheckResult(
            f"convergence/order{order}", bool(np.all(rates >= threshold)),
            {"N": list(sizes), "L1_residual": errors, "rates": list(rates),
             "seconds": time.perf_counter() - start},
            f"observed L1 order >= {threshold}"))
    return out


# -- rain box, runoff plane, determinism ---------------------------------------------

MASS_BALANCE_TOL = 1e-10
SENSITIVITY_FACTORS = (0.5, 1.0, 2.0)
STEADY_WINDOW = 1200.0


def _workdir(directory, name):
    path = Path(directory) if directory is not None else Path(tempfile.mkdtemp(prefix="shallowflow-"))
    return path / name


def run_rain_box(directory=None, workers: int = 1, tag: str = "run1", t_end: float = PLOT["rain_seconds"]):
    """Run the closed rain box; returns ``(summary, output directory)``.

    All runs under one ``directory`` share the case files and differ only in
    ``workers`` and the output subdirectory ``out_<tag>``.
    """
    case = _workdir(directory, "box")
    config = parse_config(write_rain_box(case, t_end=t_end, output_interval=min(600.0, t_end)),
                          [f"workers={workers}"])
    config = config.with_output_dir(case / f"out_{tag}")
    return run_config(config, quiet=True), Path(config.output_dir)


def mass_balance_check(summary, rain_volume: float, seconds: float) -> CheckResult:
    relative = abs(summary.residual) / rain_volume
    return CheckResult("mass-balance/rain-box", relative <= MASS_BALANCE_TOL,
                       {"residual": summary.residual, "relative": relative, "steps": summary.steps,
                        "seconds": seconds},
                       f"|residual| / rain <= {MASS_BALANCE_TOL:g}")


def verify_mass_balance(directory=None) -> CheckResult:
    start = time.perf_counter()
    summary, _ = run_rain_box(directory)
    rain = PLOT["rain_mm_h"] / 3.6e6 * PLOT["rain_seconds"] * PLOT["width"] * PLOT["length"]
    return mass_balance_check(summary, rain, time.perf_counter() - start)


def steady_discharge(hydrograph: np.ndarray, t_end: float, window: float = STEADY_WINDOW) -> float:
    """Mean outlet Q over the last ``window`` seconds before ``t_end``."""
    t, q = hydrograph[:, 0], hydrograph[:, 1]
    mask = (t >= t_end - window) & (t <= t_end)
    return float(np.mean(q[mask]))


def verify_sensitivity(directory=None, factors=SENSITIVITY_FACTORS) -> CheckResult:
    """Outlet Q at the end of rain on the tilted plane must fall as Ks grows."""
    start = time.perf_counter()
    discharges = []
    for factor in sorted(factors):
        case = _workdir(directory, f"plane_ks{factor:g}")
        config = parse_config(write_tilted_plane(case), [f"Ks={PLOT['Ks'] * factor!r}"])
        run_config(config, quiet=True)
        hydro = read_hydrograph(Path(config.output_dir) / "hydrograph.dat")
        discharges.append(steady_discharge(hydro, PLOT["rain_seconds"]))
    decreasing = all(b < a for a, b in zip(discharges, discharges[1:]))
    return CheckResult("hydrograph-sensitivity", decreasing,
                       {"Ks_factor": sorted(factors), "Q": discharges,
                        "seconds": time.perf_counter() - start},
                       "steady outlet Q strictly decreasing in Ks")


def verify_determinism(directory=None, reference: Path | None = None) -> CheckResult:
    """Rerun the rain box with one and two workers and byte-compare against ``reference``."""
    start = time.perf_counter()
    if reference is None:
        _, reference = run_rain_box(directory, workers=1, tag="run1")
    mismatches = []
    for workers, tag in ((1, "run2"), (2, "workers2")):
        _, out = run_rain_box(directory, workers=workers, tag=tag)
        same, differing = identical_outputs(reference, out)
        if not same:
            mismatches.append(f"{tag}: {', '.join(differing)}")
    files = len(list(reference.glob("snapshot_*.dat"))) + 1
    return CheckResult("determinism/rain-box", not mismatches,
                       {"files_compared": files, "mismatches": mismatches or "none",
                        "seconds": time.perf_counter() - start},
                       "bitwise-identical snapshots and hydrograph, reruns at workers 1 and 2")


def identical_outputs(a: Path, b: Path) -> tuple[bool, list[str]]:
    """Byte-compare every snapshot and the hydrograph of two output directories."""
    names = sorted(p.name for p in a.glob("snapshot_*.dat")) + ["hydrograph.dat"]
    other = sorted(p.name for p in b.glob("snapshot_*.dat")) + ["hydrograph.dat"]
    if names != other:
        return False, ["file lists differ"]
    differing = [n for n in names if (a / n).read_bytes() != (b / n).read_bytes()]
    return not differing, differing


SUITES = {
    "lake": lambda: verify_lake(),
    "ritter": lambda: [verify_positivity(), verify_ritter()],
    "convergence": lambda: verify_convergence(),
}
