"""Time loop with rain forcing, mass accounting, outlet hydrograph and outputs."""

from __future__ import annotations

import logging
import time as wallclock
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import NumericalError
from .formats import SimulationConfig, write_hydrograph, write_mass_balance, write_snapshot
from .grid import FlowState, MassLedger, StructuredGrid, Topography, total_water_volume
from .hydrology import InfiltrationState, RainfallForcing, rainfall_at
from .stepper import (SIDES, BoundaryCondition, SchemeSettings, StageResult, check_mesh_condition,
                      fill_ghosts, flux_tendencies, heun_step)

log = logging.getLogger(__name__)


def prime_ghosts(state: FlowState, topo: Topography, grid: StructuredGrid, bc: BoundaryCondition):
    """Fill every ghost once; ``fixed`` sides start as copies of the adjacent interior."""
    as_copy = BoundaryCondition(**{s: ("neumann" if getattr(bc, s) == "fixed" else getattr(bc, s))
                                   for s in SIDES})
    fill_ghosts(state, topo, grid, as_copy)


class Simulation:
    """Owns the evolving state and the volume budget of one run."""

    def __init__(self, grid: StructuredGrid, topo: Topography, state: FlowState, scheme: SchemeSettings,
                 forcing: RainfallForcing | None = None, outlet: str | None = None,
                 dt_max: float | None = None, ghosts_ready: bool = False):
        self.grid = grid
        self.topo = topo
        self.state = state
        self.scheme = scheme
        self.forcing = forcing or RainfallForcing()
        if outlet is not None and outlet not in SIDES:
            raise ValueError(f"unknown outlet side {outlet!r}")
        self.outlet = outlet
        self.dt_max = dt_max
        self.infiltration = InfiltrationState.zeros(grid.shape) if scheme.soil is not None else None
        if not ghosts_ready:
            prime_ghosts(state, topo, grid, scheme.boundary)
        self.ledger = MassLedger(initial=total_water_volume(state, grid))
        self.steps = 0
        self.last_step: StageResult | None = None
        self.h_min_seen = float(np.min(state.h[grid.inner]))
        check_mesh_condition(state, topo, grid, scheme.h_dry)

    @property
    def time(self) -> float:
        return self.state.time

    def volume(self) -> float:
        return total_water_volume(self.state, self.grid)

    def residual(self) -> float:
        return self.ledger.residual(self.volume())

    def outlet_width(self) -> float:
        return self.grid.length_y if self.outlet in ("left", "right") else self.grid.length_x

    def outlet_discharge(self) -> float:
        """Outlet Q [m³/s]: the last step's averaged boundary flux, or the current flux before any step."""
        if self.outlet is None:
            return 0.0
        if self.last_step is not None:
            return self.last_step.outflow[self.outlet] / self.last_step.dt
        fill_ghosts(self.state, self.topo, self.grid, self.scheme.boundary, self.scheme.backend)
        tend = flux_tendencies(self.state, self.topo, self.grid, self.scheme)
        width = self.grid.dy if self.outlet in ("left", "right") else self.grid.dx
        return float(np.sum(tend.boundary[self.outlet])) * width

    def step(self, t_stop: float = np.inf) -> StageResult:
        t = self.state.time
        targets = (t_stop, self.forcing.next_breakpoint(t))
        limit = min(target - t for target in targets)
        if self.dt_max is not None:
            limit = min(limit, self.dt_max)
        try:
            result = heun_step(self.state, self.topo, self.grid, self.scheme,
                               rain_rate=rainfall_at(self.forcing, t),
                               infiltration=self.infiltration, t_remaining=limit)
        except NumericalError as exc:
            raise NumericalError(f"step {self.steps + 1} (t={t:.6g}): {exc}") from None
        for target in targets:
            if result.dt == target - t:
                # land exactly on output times and rain breakpoints
                result.state.time = target
        self.state = result.state
        self.infiltration = result.infiltration
        self.ledger.rain += result.rain_volume
        self.ledger.infiltrated += result.infiltrated_volume
        for side in SIDES:
            self.ledger.outflow[side] += result.outflow[side]
        self.steps += 1
        self.last_step = result
        self.h_min_seen = min(self.h_min_seen, float(np.min(self.state.h[self.grid.inner])))
        return result

    def advance_to(self, t_stop: float) -> None:
        while self.state.time < t_stop:
            self.step(t_stop)

    def run(self, t_end: float, output_interval: float | None = None, on_output=None) -> None:
        """Advance to ``t_end``, calling ``on_output(self)`` at t=0 and every ``output_interval``."""
        interval = output_interval or t_end
        if on_output:
            on_output(self)
        k = 0
        while self.state.time < t_end:
            k += 1
            self.advance_to(min(k * interval, t_end))
            if on_output:
                on_output(self)


@dataclass
class RunSummary:
    steps: int
    final_time: float
    wall_seconds: float
    h_min: float
    h_max: float
    residual: float
    outputs: list = field(default_factory=list)


def provenance(config: SimulationConfig) -> str:
    return f"shallowflow {__version__} config_sha256={config.source_hash}"


def build_simulation(config: SimulationConfig, backend: str = "numba") -> Simulation:
    grid, topo, state = config.load_domain()
    return Simulation(grid, topo, state, config.scheme(backend), config.rainfall(),
                      config.outlet, config.dt_max)


def run_config(config: SimulationConfig, quiet: bool = False) -> RunSummary:
    """Run a configured simulation, writing snapshots, hydrograph and mass balance."""
    start = wallclock.perf_counter()
    sim = build_simulation(config)
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tag = provenance(config)
    outputs = []
    hydrograph = []

    def on_output(s: Simulation):
        k = len(hydrograph)
        path = out_dir / f"snapshot_{k:05d}.dat"
        write_snapshot(s.state, s.topo, s.grid, path, s.time, tag, s.scheme.h_dry)
        outputs.append(path)
        hydrograph.append((s.time, s.outlet_discharge()))
        if not quiet:
            h = s.state.h[s.grid.inner]
            dt = s.last_step.dt if s.last_step else 0.0
            log.info("t=%.6g dt=%.3g h_min=%.3g h_max=%.3g residual=%.3g",
                     s.time, dt, h.min(), h.max(), s.residual())

    sim.run(config.t_end, config.output_interval, on_output)

    hydro_path = out_dir / "hydrograph.dat"
    write_hydrograph(hydrograph if config.outlet else [], hydro_path, tag)
    mb_path = out_dir / "mass_balance.txt"
    residual = write_mass_balance(sim.ledger, sim.volume(), mb_path, tag)
    outputs += [hydro_path, mb_path]
    h = sim.state.h[sim.grid.inner]
    return RunSummary(sim.steps, sim.time, wallclock.perf_counter() - start,
                      float(h.min()), float(h.max()), residual, outputs)
