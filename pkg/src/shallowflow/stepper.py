"""Boundary ghosts, CFL time step, the explicit stage and the Heun step.

One stage advances every interior cell by ``dt`` with the unsplit sum of the
x and y flux differences (each computed as in 1D), then adds rain, removes
infiltration and applies semi-implicit friction.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import NegativeDepthError, NumericalError
from .friction import FrictionLaw, apply_friction_2d
from .grid import DEFAULT_G, DEFAULT_H_DRY, NGHOST, FlowState, StructuredGrid, Topography
from .hydrology import InfiltrationState, SoilParameters, infiltrated_depth
from .reconstruction import hydrostatic_reconstruct, reconstruct_axis
from .riemann import hll_flux, upwind_transverse

log = logging.getLogger(__name__)

BOUNDARY_KINDS = ("wall", "neumann", "periodic", "fixed")
SIDES = ("left", "right", "bottom", "top")
NEGATIVE_DEPTH_TOLERANCE = 1e-15


@dataclass(frozen=True)
class BoundaryCondition:
    """Per-side ghost rule.

    ``fixed`` leaves ghost cells untouched, so whatever was stored there
    (by default a copy of the initial interior) acts as a Dirichlet state.
    """

    left: str = "wall"
    right: str = "wall"
    bottom: str = "wall"
    top: str = "wall"

    def __post_init__(self):
        for side in SIDES:
            if getattr(self, side) not in BOUNDARY_KINDS:
                raise ValueError(f"unknown boundary kind {getattr(self, side)!r} on {side}")
        if (self.left == "periodic") != (self.right == "periodic"):
            raise ValueError("periodic boundaries must pair left with right")
        if (self.bottom == "periodic") != (self.top == "periodic"):
            raise ValueError("periodic boundaries must pair bottom with top")


@dataclass(frozen=True)
class CflSettings:
    order: int = 2
    n_cfl: float | None = None

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {self.order}")
        if self.n_cfl is None:
            object.__setattr__(self, "n_cfl", 0.5 if self.order == 2 else 1.0)
        if not 0 < self.n_cfl <= 1:
            raise ValueError("cfl must be in (0, 1]")


@dataclass(frozen=True)
class SchemeSettings:
    g: float = DEFAULT_G
    h_dry: float = DEFAULT_H_DRY
    cfl: CflSettings = field(default_factory=CflSettings)
    friction: FrictionLaw = field(default_factory=FrictionLaw)
    soil: SoilParameters | None = None
    boundary: BoundaryCondition = field(default_factory=BoundaryCondition)
    workers: int = 1
    backend: str = "numba"

    def __post_init__(self):
        if self.backend not in ("numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def order(self) -> int:
        return self.cfl.order


# -- boundaries ---------------------------------------------------------------

def _fill_side(arrays, kind, n, low_side):
    """Fill the ghosts of ``arrays`` (axis last) on one side.

    ``arrays`` is a list of ``(view, wall_sign)`` pairs.
    """
    g = NGHOST
    if kind == "fixed":
        return
    for k in range(g):
        if low_side:
            dst = g - 1 - k
            if kind == "wall":
                src = g + min(k, n - 1)
            elif kind == "neumann":
                src = g
            else:
                src = g + (-1 - k) % n
        else:
            dst = g + n + k
            if kind == "wall":
                src = g + n - 1 - min(k, n - 1)
            elif kind == "neumann":
                src = g + n - 1
            else:
                src = g + k % n
        for arr, sign in arrays:
            if kind == "wall" and sign < 0:
                arr[..., dst] = -arr[..., src]
            else:
                arr[..., dst] = arr[..., src]


def fill_ghosts(state: FlowState, topo: Topography, grid: StructuredGrid, bc: BoundaryCondition,
                backend: str = "numba") -> FlowState:
    """Populate the ghost ring of ``state`` and ``topo`` in place and return ``state``.

    wall: mirror h and z, negate the normal discharge; neumann: copy the
    nearest interior cell; periodic: wrap from the opposite side.
    """
    if backend == "numba":
        from .kernels import SIDE_KINDS, fill_ring

        kinds = np.array([SIDE_KINDS[getattr(bc, s)] for s in SIDES], dtype=np.int64)
        for arr, sx, sy in ((state.h, 1.0, 1.0), (state.qx, -1.0, 1.0), (state.qy, 1.0, -1.0), (topo.z, 1.0, 1.0)):
            fill_ring(arr, kinds, sx, sy, NGHOST)
        return state
    x_fields = [(state.h, 1), (state.qx, -1), (state.qy, 1), (topo.z, 1)]
    _fill_side(x_fields, bc.left, grid.nx, True)
    _fill_side(x_fields, bc.right, grid.nx, False)
    y_fields = [(state.h.T, 1), (state.qy.T, -1), (state.qx.T, 1), (topo.z.T, 1)]
    _fill_side(y_fields, bc.bottom, grid.ny, True)
    _fill_side(y_fields, bc.top, grid.ny, False)
    return state


# -- fluxes -------------------------------------------------------------------

def _sweep_numpy(h, qn, qt, z, d, g, h_dry, order):
    """Tendencies along the last axis for the interior cells of each row.

    Returns ``(dh, dqn, dqt, f_low, f_high, speed)``: tendencies per unit
    time, the mass fluxes through the two end faces (positive in the +axis
    direction) and the per-row CFL speed over interior faces of wet cells.
    """
    rec = reconstruct_axis(h, qn, qt, z, d, h_dry, order)
    # interface k lies between reconstructed cells k and k+1
    h_minus, h_plus = rec.h_hi[..., :-1], rec.h_lo[..., 1:]
    hL, hR = hydrostatic_reconstruct(h_minus, rec.z_hi[..., :-1], h_plus, rec.z_lo[..., 1:])
    flux = hll_flux(hL, rec.un_hi[..., :-1], hR, rec.un_lo[..., 1:], g, h_dry)
    f_t = upwind_transverse(flux.f_h, rec.ut_hi[..., :-1], rec.ut_lo[..., 1:])

    half_g = 0.5 * g
    f_left_cell = flux.f_q + half_g * (h_minus * h_minus - hL * hL)
    f_right_cell = flux.f_q + half_g * (h_plus * h_plus - hR * hR)

    inner = (Ellipsis, slice(1, -1))
    hlo, hhi = rec.h_lo[inner], rec.h_hi[inner]
    sc = -half_g * (hlo + hhi) * (rec.z_hi[inner] - rec.z_lo[inner])

    inv_d = 1.0 / d
    dh = -(flux.f_h[..., 1:] - flux.f_h[..., :-1]) * inv_d
    dqn = -(f_left_cell[..., 1:] - f_right_cell[..., :-1] - sc) * inv_d
    dqt = -(f_t[..., 1:] - f_t[..., :-1]) * inv_d

    wet = h[..., 2:-2] >= h_dry
    s_lo = np.maximum(np.abs(rec.un_lo[inner]), np.abs(rec.ut_lo[inner])) + np.sqrt(g * hlo)
    s_hi = np.maximum(np.abs(rec.un_hi[inner]), np.abs(rec.ut_hi[inner])) + np.sqrt(g * hhi)
    speed = np.max(np.where(wet, np.maximum(s_lo, s_hi), 0.0), axis=-1)
    return dh, dqn, dqt, flux.f_h[..., 0], flux.f_h[..., -1], speed


def _sweep_compiled(h, qn, qt, z, d, g, h_dry, order):
    from .kernels import sweep_rows

    return sweep_rows(np.ascontiguousarray(h), np.ascontiguousarray(qn), np.ascontiguousarray(qt),
                      np.ascontiguousarray(z), float(d), float(g), float(h_dry), int(order))


_BACKENDS = {"numpy": _sweep_numpy, "numba": _sweep_compiled}


@lru_cache(maxsize=None)
def _executor(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(max_workers=workers, thread_name_prefix="sweep")


def _sweep_rows(h, qn, qt, z, d, scheme):
    """Run one sweep over independent row blocks; per-element results do not depend on the split."""
    sweep = _BACKENDS[scheme.backend]
    args = (d, scheme.g, scheme.h_dry, scheme.order)
    m = h.shape[0]
    workers = min(scheme.workers, m)
    if workers <= 1:
        return sweep(h, qn, qt, z, *args)
    bounds = np.linspace(0, m, workers + 1).astype(int)
    blocks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
    parts = list(_executor(workers).map(lambda s: sweep(h[s], qn[s], qt[s], z[s], *args), blocks))
    return tuple(np.concatenate([p[k] for p in parts], axis=0) for k in range(6))


@dataclass
class Tendencies:
    """Flux-difference rates for the interior and what the CFL bound needs."""

    dh: np.ndarray
    dqx: np.ndarray
    dqy: np.ndarray
    boundary: dict  # side -> outward mass flux per face [m²/s]
    max_speed: float
    inv_length: float  # 1/dx in 1D, 1/dx + 1/dy in 2D


def flux_tendencies(state: FlowState, topo: Topography, grid: StructuredGrid,
                    scheme: SchemeSettings) -> Tendencies:
    """Unsplit x + y flux tendencies. Ghosts must already be filled."""
    G = NGHOST
    if scheme.backend == "numba" and scheme.workers == 1 and not grid.is_1d:
        from .kernels import tendencies_2d

        dh, dqx, dqy, left, right, bottom, top, max_speed = tendencies_2d(
            state.h, state.qx, state.qy, topo.z, float(grid.dx), float(grid.dy), float(scheme.g),
            float(scheme.h_dry), int(scheme.order), G)
        return Tendencies(dh, dqx, dqy, {"left": left, "right": right, "bottom": bottom, "top": top},
                          float(max_speed), 1.0 / grid.dx + 1.0 / grid.dy)
    rows = slice(G, G + grid.ny)
    cols = slice(G, G + grid.nx)
    dh, dqx, dqy, f_lo, f_hi, speed = _sweep_rows(
        state.h[rows], state.qx[rows], state.qy[rows], topo.z[rows], grid.dx, scheme)
    boundary = {"left": -f_lo, "right": f_hi}
    max_speed = float(np.max(speed))
    inv_length = 1.0 / grid.dx
    if grid.is_1d:
        # with one row the y sweep contributes exactly zero and is skipped
        zero = np.zeros(grid.nx)
        boundary.update(bottom=zero, top=zero)
    else:
        dh_y, dqy_y, dqx_y, f_lo_y, f_hi_y, speed_y = _sweep_rows(
            state.h[:, cols].T, state.qy[:, cols].T, state.qx[:, cols].T, topo.z[:, cols].T,
            grid.dy, scheme)
        dh = dh + dh_y.T
        dqx = dqx + dqx_y.T
        dqy = dqy + dqy_y.T
        boundary.update(bottom=-f_lo_y, top=f_hi_y)
        max_speed = max(max_speed, float(np.max(speed_y)))
        inv_length = 1.0 / grid.dx + 1.0 / grid.dy
    return Tendencies(dh, dqx, dqy, boundary, max_speed, inv_length)


# -- time step ----------------------------------------------------------------

def cfl_dt(tend: Tendencies, scheme: SchemeSettings, t_remaining: float = np.inf) -> float:
    if tend.max_speed == 0.0:
        return float(t_remaining)
    return float(min(scheme.cfl.n_cfl / (tend.max_speed * tend.inv_length), t_remaining))


def compute_dt(state: FlowState, topo: Topography, grid: StructuredGrid, scheme: SchemeSettings,
               t_remaining: float = np.inf) -> float:
    """CFL-limited time step, clipped to ``t_remaining``.

    With ``a = max(|u|, |v|) + sqrt(g h)`` the bound is ``n_cfl / (a / dx)``
    in 1D and ``n_cfl / (a (1/dx + 1/dy))`` in 2D: the unsplit update drains a
    cell through both axes at once, so the 1D positivity condition must hold
    for the summed outflow, not for each axis separately. At order 2
    the speeds come from the reconstructed face values. An all-dry domain
    returns ``t_remaining``.
    """
    fill_ghosts(state, topo, grid, scheme.boundary, scheme.backend)
    return cfl_dt(flux_tendencies(state, topo, grid, scheme), scheme, t_remaining)


# -- stages -------------------------------------------------------------------

@dataclass
class StageResult:
    state: FlowState
    infiltration: InfiltrationState | None
    dt: float
    outflow: dict
    rain_volume: float
    infiltrated_volume: float


def _check_finite(grid, stage, **fields):
    for name, arr in fields.items():
        bad = ~np.isfinite(arr)
        if bad.any():
            j, i = np.argwhere(bad)[0]
            raise NumericalError(f"non-finite {name} at cell (i={i}, j={j}) during {stage} "
                                 f"(value {arr[j, i]!r})")


def _stage_numpy(h0, qx0, qy0, tend: Tendencies, grid, scheme: SchemeSettings, dt, rain_rate, V, stage):
    """Pointwise part of a stage; returns ``(h, qx, qy, infiltrated depth or None)``."""
    h = h0 + dt * tend.dh
    qx = qx0 + dt * tend.dqx
    qy = qy0 + dt * tend.dqy
    _check_finite(grid, stage, h=h, qx=qx, qy=qy)

    neg = h < 0.0
    if neg.any():
        worst = np.unravel_index(np.argmin(h), h.shape)
        if h[worst] < -NEGATIVE_DEPTH_TOLERANCE:
            j, i = worst
            raise NegativeDepthError(f"negative depth {h[worst]!r} at cell (i={i}, j={j}) during {stage}")
        h = np.where(neg, 0.0, h)

    if rain_rate > 0.0:
        h = h + dt * rain_rate

    depth = None
    if V is not None:
        depth = infiltrated_depth(scheme.soil, V, h, dt)
        h = h - depth

    if scheme.friction.active:
        qx, qy = apply_friction_2d(h, qx, qy, qx0, qy0, h0, scheme.friction, dt, scheme.g, scheme.h_dry)
    else:
        dry = h < scheme.h_dry
        if dry.any():
            qx = np.where(dry, 0.0, qx)
            qy = np.where(dry, 0.0, qy)
    _check_finite(grid, stage, qx=qx, qy=qy)
    return h, qx, qy, depth


def _stage_compiled(h0, qx0, qy0, tend: Tendencies, grid, scheme: SchemeSettings, dt, rain_rate, V, stage):
    from .kernels import FRICTION_DARCY, FRICTION_NONE, stage_update

    law = scheme.friction
    if not law.active:
        kind, factor = FRICTION_NONE, 0.0
    elif law.kind == "darcy_weisbach":
        kind, factor = FRICTION_DARCY, law.coefficient / 8.0
    else:
        # numpy's vectorised cbrt and the compiled one differ in the last ulp
        return _stage_numpy(h0, qx0, qy0, tend, grid, scheme, dt, rain_rate, V, stage)
    soil = np.array([scheme.soil.Ks, scheme.soil.hf, scheme.soil.dtheta]) if V is not None else np.empty(0)
    h, qx, qy, depth, ok = stage_update(
        h0, qx0, qy0, tend.dh, tend.dqx, tend.dqy, float(dt), float(dt * rain_rate) if rain_rate > 0.0 else 0.0,
        soil, V if V is not None else h0, kind, factor, scheme.h_dry, NEGATIVE_DEPTH_TOLERANCE)
    if not ok:
        # rerun the reference path, which raises with the cell and stage named
        return _stage_numpy(h0, qx0, qy0, tend, grid, scheme, dt, rain_rate, V, stage)
    return h, qx, qy, (depth if V is not None else None)


_STAGES = {"numpy": _stage_numpy, "numba": _stage_compiled}


def euler_stage(state: FlowState, topo: Topography, grid: StructuredGrid, scheme: SchemeSettings,
                dt: float, rain_rate: float = 0.0, infiltration: InfiltrationState | None = None,
                stage: str = "stage", tendencies: Tendencies | None = None) -> StageResult:
    """Advance ``state`` by one explicit stage of length ``dt``.

    Order inside the stage: flux update, rain, infiltration against the
    updated depth, semi-implicit friction with the stage-input discharge.
    """
    if tendencies is None:
        fill_ghosts(state, topo, grid, scheme.boundary, scheme.backend)
        tendencies = flux_tendencies(state, topo, grid, scheme)
    inner = grid.inner
    h0, qx0, qy0 = state.h[inner], state.qx[inner], state.qy[inner]
    infiltrating = scheme.soil is not None and infiltration is not None
    V = infiltration.V_inf if infiltrating else None

    h, qx, qy, depth = _STAGES[scheme.backend](h0, qx0, qy0, tendencies, grid, scheme, dt, rain_rate, V, stage)

    area = grid.cell_area
    rain_volume = dt * rain_rate * area * grid.nx * grid.ny if rain_rate > 0.0 else 0.0
    new_infil = infiltration
    infiltrated_volume = 0.0
    if infiltrating:
        new_infil = InfiltrationState(V + depth)
        infiltrated_volume = float(np.sum(depth)) * area

    new = state.copy()
    new.h[inner] = h
    new.qx[inner] = qx
    new.qy[inner] = qy
    new.time = state.time + dt

    boundary = tendencies.boundary
    outflow = {
        "left": float(np.sum(boundary["left"])) * dt * grid.dy,
        "right": float(np.sum(boundary["right"])) * dt * grid.dy,
        "bottom": float(np.sum(boundary["bottom"])) * dt * grid.dx,
        "top": float(np.sum(boundary["top"])) * dt * grid.dx,
    }
    return StageResult(new, new_infil, dt, outflow, rain_volume, infiltrated_volume)


def heun_combine(u0, u2):
    """Average of the step-start value and the two-stage value."""
    return 0.5 * (u0 + u2)


MAX_STEP_RETRIES = 20


def heun_step(state: FlowState, topo: Topography, grid: StructuredGrid, scheme: SchemeSettings,
              dt: float | None = None, rain_rate: float = 0.0,
              infiltration: InfiltrationState | None = None, t_remaining: float = np.inf) -> StageResult:
    """Heun predictor-corrector step with ``dt`` frozen from the step-start state.

    At order 1 a single explicit stage is taken instead. The returned volumes
    are the Heun-averaged stage volumes, so they close the mass balance.

    When ``dt`` comes from the CFL bound and a stage goes negative, the whole
    step is retried with the bound evaluated on the predictor state (or half
    the step if that is not smaller). Steps that succeed are never altered.
    """
    fill_ghosts(state, topo, grid, scheme.boundary, scheme.backend)
    tend = flux_tendencies(state, topo, grid, scheme)
    adaptive = dt is None
    if adaptive:
        dt = cfl_dt(tend, scheme, t_remaining)
    if not np.isfinite(dt):
        raise ValueError("dry domain gives no CFL bound: pass a finite t_remaining or dt")
    for attempt in range(MAX_STEP_RETRIES + 1):
        first = None
        try:
            first = euler_stage(state, topo, grid, scheme, dt, rain_rate, infiltration, "predictor", tend)
            if scheme.order == 1:
                return first
            fill_ghosts(first.state, topo, grid, scheme.boundary, scheme.backend)
            tend_star = flux_tendencies(first.state, topo, grid, scheme)
            second = euler_stage(first.state, topo, grid, scheme, dt, rain_rate, first.infiltration,
                                 "corrector", tend_star)
            break
        except NegativeDepthError:
            if not adaptive or attempt == MAX_STEP_RETRIES:
                raise
            bound = cfl_dt(tend_star, scheme, t_remaining) if first is not None and scheme.order == 2 else dt
            dt = bound if bound < dt else 0.5 * dt
            log.debug("negative depth, retrying step with dt=%.6g", dt)

    new = FlowState(heun_combine(state.h, second.state.h), heun_combine(state.qx, second.state.qx),
                    heun_combine(state.qy, second.state.qy), state.time + dt)
    dry = new.h < scheme.h_dry
    if dry.any():
        new.qx[dry] = 0.0
        new.qy[dry] = 0.0
    infil = None
    if infiltration is not None:
        infil = InfiltrationState(heun_combine(infiltration.V_inf, second.infiltration.V_inf))
    outflow = {side: heun_combine(first.outflow[side], second.outflow[side]) for side in SIDES}
    return StageResult(new, infil, dt, outflow,
                       heun_combine(first.rain_volume, second.rain_volume),
                       heun_combine(first.infiltrated_volume, second.infiltrated_volume))


def check_mesh_condition(state: FlowState, topo: Topography, grid: StructuredGrid,
                         h_dry: float = DEFAULT_H_DRY) -> bool:
    """Warn when the mean wet depth is smaller than the bed jump between cells.

    Hydrostatic reconstruction loses accuracy on coarse meshes over thin
    water; this is advisory only. Returns True when the warning fired.
    """
    h = state.h[grid.inner]
    z = topo.z[grid.inner]
    wet = h >= h_dry
    if not wet.any():
        return False
    jumps = [np.max(np.abs(np.diff(z, axis=1)))] if grid.nx > 1 else [0.0]
    if grid.ny > 1:
        jumps.append(np.max(np.abs(np.diff(z, axis=0))))
    jump = float(max(jumps))
    mean_depth = float(np.mean(h[wet]))
    if mean_depth < jump:
        log.warning("mean wet depth %.3g m is below the bed jump per cell %.3g m; "
                    "consider refining the mesh", mean_depth, jump)
        return True
    return False
