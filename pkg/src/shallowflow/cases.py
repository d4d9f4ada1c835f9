"""Writers for ready-to-run case directories (DEM, rain file, config).

Plot geometry and soil values used by the runoff cases:
4 m x 10 m at 0.1 m cells, 70 mm/h of rain for two hours, Darcy-Weisbach
f = 0.26, Green-Ampt hf = 0.06 m, dtheta = 0.12, Ks = 4.4e-6 m/s.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .formats import dem_from_array, write_dem

PLOT = {
    "width": 4.0,
    "length": 10.0,
    "cellsize": 0.1,
    "rain_mm_h": 70.0,
    "rain_seconds": 7200.0,
    "f": 0.26,
    "hf": 0.06,
    "dtheta": 0.12,
    "Ks": 4.4e-6,
}


def _write_case(directory, z, cellsize, settings: dict, rain=None) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_dem(dem_from_array(z, cellsize), directory / "dem.asc")
    lines = ["dem_file = dem.asc"]
    if rain is not None:
        (directory / "rain.txt").write_text("".join(f"{t:g} {r:g}\n" for t, r in rain))
        lines.append("rain_file = rain.txt")
    lines += [f"{k} = {v}" for k, v in settings.items()]
    path = directory / "case.cfg"
    path.write_text("\n".join(lines) + "\n")
    return path


def plot_rain():
    return [(0.0, PLOT["rain_mm_h"]), (PLOT["rain_seconds"], 0.0)]


def write_rain_box(directory, t_end: float = PLOT["rain_seconds"], output_interval: float = 600.0,
                   **overrides) -> Path:
    """Closed flat 4 m x 10 m box under the plot rain, with Green-Ampt infiltration."""
    nx = round(PLOT["width"] / PLOT["cellsize"])
    ny = round(PLOT["length"] / PLOT["cellsize"])
    settings = {
        "t_end": t_end,
        "output_interval": output_interval,
        "infiltration": "greenampt",
        "Ks": PLOT["Ks"],
        "hf": PLOT["hf"],
        "dtheta": PLOT["dtheta"],
        "dt_max": 1.0,
        "output_dir": Path(directory) / "out",
    }
    settings.update(overrides)
    return _write_case(directory, np.zeros((ny, nx)), PLOT["cellsize"], settings, plot_rain())


def write_tilted_plane(directory, slope: float = 0.01, t_end: float = PLOT["rain_seconds"],
                       output_interval: float = 300.0, width: float = PLOT["width"],
                       length: float = PLOT["length"], **overrides) -> Path:
    """Plane of the plot size falling toward an open outlet along the bottom (y = 0) edge."""
    d = PLOT["cellsize"]
    nx, ny = round(width / d), round(length / d)
    y = (np.arange(ny) + 0.5) * d
    z = np.tile((slope * y)[:, None], (1, nx))
    settings = {
        "t_end": t_end,
        "output_interval": output_interval,
        "friction": "darcy-weisbach",
        "friction_coefficient": PLOT["f"],
        "infiltration": "greenampt",
        "Ks": PLOT["Ks"],
        "hf": PLOT["hf"],
        "dtheta": PLOT["dtheta"],
        "dt_max": 1.0,
        "boundary_bottom": "neumann",
        "outlet": "bottom",
        "output_dir": Path(directory) / "out",
    }
    settings.update(overrides)
    return _write_case(directory, z, d, settings, plot_rain())


def write_lake(directory, n: int = 50, eta: float = 1.0, t_end: float = 10.0, **overrides) -> Path:
    """Still water over a Gaussian bump on a closed unit square."""
    d = 1.0 / n
    c = (np.arange(n) + 0.5) * d
    X, Y = np.meshgrid(c, c)
    z = 0.5 * np.exp(-50.0 * ((X - 0.5) ** 2 + (Y - 0.5) ** 2))
    settings = {"t_end": t_end, "output_interval": t_end / 2, "initial_surface": eta,
                "output_dir": Path(directory) / "out"}
    settings.update(overrides)
    return _write_case(directory, z, d, settings)
