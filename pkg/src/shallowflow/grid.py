"""Structured grid, flow state, topography and physical constants.

All fields are stored cell-centered, row-major with shape ``(ny, nx)`` plus a
ghost ring of ``NGHOST`` cells on every side, so a padded field has shape
``(ny + 2 * NGHOST, nx + 2 * NGHOST)`` and is indexed ``[j, i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# MUSCL slopes in the first ghost layer need one more cell outward.
NGHOST = 2

DEFAULT_G = 9.81
DEFAULT_H_DRY = 1e-12


@dataclass(frozen=True)
class StructuredGrid:
    nx: int
    ny: int
    dx: float
    dy: float
    origin_x: float = 0.0
    origin_y: float = 0.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"invalid dimension nx={self.nx}, ny={self.ny}")
        if not (self.dx > 0 and self.dy > 0):
            raise ValueError(f"cell sizes must be positive, got dx={self.dx}, dy={self.dy}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.ny, self.nx)

    @property
    def padded_shape(self) -> tuple[int, int]:
        return (self.ny + 2 * NGHOST, self.nx + 2 * NGHOST)

    @property
    def inner(self) -> tuple[slice, slice]:
        """Index expression selecting the interior of a padded field."""
        return (slice(NGHOST, NGHOST + self.ny), slice(NGHOST, NGHOST + self.nx))

    @property
    def is_1d(self) -> bool:
        return self.ny == 1

    @property
    def cell_area(self) -> float:
        return self.dx * self.dy

    @property
    def length_x(self) -> float:
        return self.nx * self.dx

    @property
    def length_y(self) -> float:
        return self.ny * self.dy

    def x_centers(self, ghosts: bool = False) -> np.ndarray:
        k = NGHOST if ghosts else 0
        i = np.arange(-k, self.nx + k)
        return self.origin_x + (i + 0.5) * self.dx

    def y_centers(self, ghosts: bool = False) -> np.ndarray:
        k = NGHOST if ghosts else 0
        j = np.arange(-k, self.ny + k)
        return self.origin_y + (j + 0.5) * self.dy

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.origin_x + (i + 0.5) * self.dx, self.origin_y + (j + 0.5) * self.dy)

    def pad(self, interior) -> np.ndarray:
        """Embed an interior field (or scalar) into a zero padded array."""
        out = np.zeros(self.padded_shape)
        out[self.inner] = interior
        return out


@dataclass
class FlowState:
    """Conserved variables h, qx = hu, qy = hv on padded arrays."""

    h: np.ndarray
    qx: np.ndarray
    qy: np.ndarray
    time: float = 0.0

    @classmethod
    def zeros(cls, grid: StructuredGrid, time: float = 0.0) -> FlowState:
        return cls(np.zeros(grid.padded_shape), np.zeros(grid.padded_shape),
                   np.zeros(grid.padded_shape), time)

    @classmethod
    def from_interior(cls, grid: StructuredGrid, h, qx=0.0, qy=0.0, time: float = 0.0) -> FlowState:
        return cls(grid.pad(h), grid.pad(qx), grid.pad(qy), time)

    def copy(self) -> FlowState:
        return FlowState(self.h.copy(), self.qx.copy(), self.qy.copy(), self.time)


@dataclass
class Topography:
    """Bed elevation z on the padded grid; ghosts are filled by the boundary code."""

    z: np.ndarray

    @classmethod
    def from_interior(cls, grid: StructuredGrid, z) -> Topography:
        z = np.broadcast_to(np.asarray(z, dtype=float), grid.shape)
        if not np.all(np.isfinite(z)):
            raise ValueError("topography must be finite at every cell")
        return cls(grid.pad(z))

    @classmethod
    def flat(cls, grid: StructuredGrid, level: float = 0.0) -> Topography:
        return cls.from_interior(grid, np.full(grid.shape, level))


@dataclass(frozen=True)
class PhysicalConstants:
    g: float = DEFAULT_G

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"g must be positive, got {self.g}")


def primitive_velocity(h, q, h_dry: float = DEFAULT_H_DRY):
    """Guarded velocity q/h, zero where the depth is below ``h_dry``."""
    h = np.asarray(h, dtype=float)
    q = np.asarray(q, dtype=float)
    wet = h >= h_dry
    u = np.where(wet, q / np.where(wet, h, 1.0), 0.0)
    return u[()] if u.ndim == 0 else u


def total_water_volume(state: FlowState, grid: StructuredGrid) -> float:
    # np.sum uses pairwise summation over a fixed layout, so this is reproducible
    return float(np.sum(state.h[grid.inner]) * grid.cell_area)


@dataclass
class MassLedger:
    """Running volume budget for a simulation [m³]."""

    initial: float = 0.0
    rain: float = 0.0
    infiltrated: float = 0.0
    outflow: dict = field(default_factory=lambda: {"left": 0.0, "right": 0.0, "bottom": 0.0, "top": 0.0})

    @property
    def total_outflow(self) -> float:
        return sum(self.outflow.values())

    def expected(self) -> float:
        return self.initial + self.rain - self.infiltrated - self.total_outflow

    def residual(self, final: float) -> float:
        return final - self.expected()
