"""Rainfall forcing and Green-Ampt infiltration."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SECONDS_PER_HOUR_MM = 3.6e6  # mm/h -> m/s divisor


def mm_per_hour(rate):
    return rate / SECONDS_PER_HOUR_MM


@dataclass(frozen=True)
class SoilParameters:
    Ks: float
    hf: float
    dtheta: float

    def __post_init__(self):
        if self.Ks < 0 or self.hf < 0:
            raise ValueError("Ks and hf must be >= 0")
        if self.Ks > 0 and not (0 < self.dtheta <= 1):
            raise ValueError(f"dtheta must be in (0, 1] when Ks > 0, got {self.dtheta}")


@dataclass
class InfiltrationState:
    """Cumulative infiltrated depth per interior cell [m]."""

    V_inf: np.ndarray

    @classmethod
    def zeros(cls, shape) -> InfiltrationState:
        return cls(np.zeros(shape))

    def wetting_front_depth(self, soil: SoilParameters) -> np.ndarray:
        return self.V_inf / soil.dtheta

    def copy(self) -> InfiltrationState:
        return InfiltrationState(self.V_inf.copy())


@dataclass(frozen=True)
class RainfallForcing:
    """Piecewise-constant intensity: each ``(time [s], R [m/s])`` holds until the next."""

    breakpoints: tuple = field(default_factory=tuple)

    def __post_init__(self):
        bps = tuple((float(t), float(r)) for t, r in self.breakpoints)
        times = [t for t, _ in bps]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("rainfall breakpoint times must be strictly increasing")
        if any(r < 0 for _, r in bps):
            raise ValueError("rainfall intensities must be >= 0")
        object.__setattr__(self, "breakpoints", bps)

    @classmethod
    def constant(cls, intensity: float, duration: float) -> RainfallForcing:
        return cls(((0.0, intensity), (duration, 0.0)))

    @classmethod
    def from_file(cls, path) -> RainfallForcing:
        """Two columns: time [s] and intensity [mm/h]; '#' starts a comment."""
        rows = []
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'time intensity', got {line!r}")
            try:
                t, r = float(parts[0]), float(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: unparsable number in {line!r}") from None
            rows.append((t, mm_per_hour(r)))
        return cls(tuple(rows))

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.breakpoints]

    def next_breakpoint(self, t: float) -> float:
        """First breakpoint time strictly after ``t`` (inf if none)."""
        times = self.times
        k = bisect.bisect_right(times, t)
        return times[k] if k < len(times) else float("inf")


def rainfall_at(forcing: RainfallForcing, t: float) -> float:
    times = forcing.times
    k = bisect.bisect_right(times, t)
    if k == 0:
        return 0.0
    return forcing.breakpoints[k - 1][1]


def infiltration_capacity(soil: SoilParameters, V_inf, h_sur):
    """Green-Ampt capacity ``Ks (1 + (hf - h_sur) / Z_f)`` with ``Z_f = V_inf / dtheta``.

    Returns ``inf`` where nothing has infiltrated yet (Z_f = 0) and clamps
    negative capacities at 0.
    """
    V_inf = np.asarray(V_inf, dtype=float)
    h_sur = np.asarray(h_sur, dtype=float)
    if soil.Ks == 0:
        out = np.zeros(np.broadcast(V_inf, h_sur).shape)
    else:
        started = V_inf > 0
        zf = np.where(started, V_inf, 1.0) / soil.dtheta
        with np.errstate(over="ignore"):
            # a subnormal V_inf overflows to an unbounded capacity, which is the limit
            cap = soil.Ks * (1.0 + (soil.hf - h_sur) / zf)
        out = np.where(started, np.maximum(cap, 0.0), np.inf)
    return out[()] if out.ndim == 0 else out


def infiltration_rate(capacity, h_sur, dt):
    """``min(h_sur, dt * I_C) / dt``; an unbounded capacity takes all of ``h_sur``."""
    return np.minimum(h_sur, dt * capacity) / dt


def infiltrated_depth(soil: SoilParameters, V_inf, h_sur, dt):
    """Depth removed from the surface over ``dt``: ``min(h_sur, dt * I_C)``."""
    return np.minimum(h_sur, dt * infiltration_capacity(soil, V_inf, h_sur))


def infiltrate(soil: SoilParameters, V_inf, h_sur, dt):
    """Return ``(I, new_V_inf)``; the caller removes ``dt * I`` from the surface."""
    depth = infiltrated_depth(soil, V_inf, h_sur, dt)
    return depth / dt, V_inf + depth
