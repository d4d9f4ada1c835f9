#!/usr/bin/env python3
"""Compute the unit-level test vectors by direct evaluation, independent of the package.

Only the standard library is used; nothing from ``shallowflow`` is imported.
The printed values are frozen into ``tests/test_vectors.py``; rerun with
``--check`` to confirm the frozen copy still matches.

    python3 scripts/derive_test_vectors.py          # print the vectors
    python3 scripts/derive_test_vectors.py --json   # machine-readable
"""

from __future__ import annotations

import argparse
import json
import math
from fractions import Fraction

G = 9.81


def muscl_velocity():
    u, du, h, h_lo, h_hi, dx = 3.0, 1.0, 2.0, 1.5, 2.5, 1.0
    u_lo = u - (h_hi / h) * (dx / 2) * du
    u_hi = u + (h_lo / h) * (dx / 2) * du
    # the identity holds exactly in rationals; the float check is separate
    exact = Fraction(3, 2) * Fraction(19, 8) + Fraction(5, 2) * Fraction(27, 8)
    assert exact == 2 * 2 * 3
    return {"u_lo": u_lo, "u_hi": u_hi, "discharge_sum": h_lo * u_lo + h_hi * u_hi, "two_h_u": 2 * h * u}


def interface_source():
    def s(h_face, h_rec):
        return G / 2 * (h_face ** 2 - h_rec ** 2)
    return {"h1_h0.5": s(1.0, 0.5), "h0.2_h0": s(0.2, 0.0)}


def centered_source():
    h_lo = h_hi = 1.0
    z_lo, z_hi = 0.0, 0.1
    return {"value": -G * (h_lo + h_hi) / 2 * (z_hi - z_lo)}


def wave_speeds():
    c = math.sqrt(G * 1.0)
    return {"c1": 2.0 - c, "c2": 2.0 + c}


def hll_middle_branch():
    hL, hR = 1.0, 2.0
    c1, c2 = -math.sqrt(G * hR), math.sqrt(G * hR)
    fL = (0.0, G * hL ** 2 / 2)
    fR = (0.0, G * hR ** 2 / 2)
    uL, uR = (hL, 0.0), (hR, 0.0)
    # textbook HLL: (c2 F_L - c1 F_R + c1 c2 (U_R - U_L)) / (c2 - c1)
    flux = [(c2 * fL[k] - c1 * fR[k] + c1 * c2 * (uR[k] - uL[k])) / (c2 - c1) for k in range(2)]
    return {"f_h": flux[0], "f_q": flux[1], "c1": c1, "c2": c2}


def friction():
    f, dt = 0.26, 1.0
    one_d = 1.0 / (1.0 + dt * f * abs(1.0) / (8.0 * 1.0 * 1.0))
    norm = math.hypot(3.0, 4.0)
    factor = 1.0 + dt * f * norm / (8.0 * 1.0 * 1.0)
    return {"q_new_1d": one_d, "qx_2d": 3.0 / factor, "qy_2d": 4.0 / factor, "factor_2d": factor}


def green_ampt():
    Ks, hf, dtheta, V = 4.4e-6, 0.06, 0.12, 1.2e-3
    Zf = V / dtheta
    capacity = Ks * (1.0 + (hf + 0.0) / Zf)
    abundant = min(1.0, 1.0 * capacity)
    scarce = min(1e-6, 1.0 * capacity)
    return {"Z_f": Zf, "I_C": capacity, "I_abundant": abundant, "I_scarce": scarce}


def cfl_dt():
    n_cfl, dx, u, h = 0.5, 0.1, 1.0, 1.0
    speed = abs(u) + math.sqrt(G * h)
    return {"speed": speed, "dt": n_cfl * dx / speed, "dt_ncfl1": 1.0 * dx / speed}


def rain():
    return {"70mm_per_h": 70.0 / 3.6e6}


def normal_depth_slope():
    f, q0, h = 0.26, 0.5, 1.0
    return {"z_prime": -f * q0 ** 2 / (8 * G * h ** 3)}


VECTORS = {
    "muscl_velocity": muscl_velocity,
    "interface_source": interface_source,
    "centered_source": centered_source,
    "wave_speeds": wave_speeds,
    "hll_middle_branch": hll_middle_branch,
    "friction": friction,
    "green_ampt": green_ampt,
    "cfl_dt": cfl_dt,
    "rain": rain,
    "normal_depth_slope": normal_depth_slope,
}


def derive() -> dict:
    return {name: fn() for name, fn in VECTORS.items()}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--json", action="store_true")
    args = parser.parse_args()
    values = derive()
    if args.json:
        print(json.dumps(values, indent=2))
        return
    for group, entries in values.items():
        for key, value in entries.items():
            print(f"{group:20s} {key:16s} {value!r}")


if __name__ == "__main__":
    main()
