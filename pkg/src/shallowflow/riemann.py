"""HLL approximate Riemann flux for the 1D shallow water system."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class InterfaceFlux:
    f_h: np.ndarray
    f_q: np.ndarray
    max_speed: np.ndarray


def physical_flux(h, u, g):
    return h * u, h * u * u + 0.5 * g * h * h


def wave_speeds(hL, uL, hR, uR, g):
    """Slowest and fastest eigenvalue estimates ``u -/+ sqrt(g h)`` over both states."""
    cL = np.sqrt(g * hL)
    cR = np.sqrt(g * hR)
    c1 = np.minimum(uL - cL, uR - cR)
    c2 = np.maximum(uL + cL, uR + cR)
    return c1, c2


def hll_flux(hL, uL, hR, uR, g, h_dry=1e-12) -> InterfaceFlux:
    """HLL flux between states (hL, hL*uL) and (hR, hR*uR).

    The blended branch is evaluated as ``F_L + c1 [(F_L - F_R) + c2 (U_R - U_L)] / (c2 - c1)``,
    algebraically the textbook form but exactly ``F(U)`` when both states agree.
    """
    hL = np.asarray(hL, dtype=float)
    hR = np.asarray(hR, dtype=float)
    c1, c2 = wave_speeds(hL, uL, hR, uR, g)
    qL = hL * uL
    qR = hR * uR
    fqL = qL * uL + 0.5 * g * hL * hL
    fqR = qR * uR + 0.5 * g * hR * hR

    dry = (hL < h_dry) & (hR < h_dry)
    denom = np.where(dry, 1.0, c2 - c1)
    scale = c1 / denom
    mid_h = qL + scale * ((qL - qR) + c2 * (hR - hL))
    mid_q = fqL + scale * ((fqL - fqR) + c2 * (qR - qL))

    f_h = np.where(c1 > 0, qL, np.where(c2 < 0, qR, mid_h))
    f_q = np.where(c1 > 0, fqL, np.where(c2 < 0, fqR, mid_q))
    speed = np.maximum(np.abs(c1), np.abs(c2))
    f_h = np.where(dry, 0.0, f_h)
    f_q = np.where(dry, 0.0, f_q)
    speed = np.where(dry, 0.0, speed)
    if f_h.ndim == 0:
        return InterfaceFlux(f_h[()], f_q[()], speed[()])
    return InterfaceFlux(f_h, f_q, speed)


def upwind_transverse(f_h, vL, vR):
    """Transverse momentum carried by the mass flux, upwinded on its sign."""
    return f_h * np.where(f_h >= 0, vL, vR)


def transverse_flux(hL, uL, vL, hR, uR, vR, g, h_dry=1e-12):
    """Normal HLL flux plus the advected transverse momentum ``(f_h, f_qn, f_qt)``."""
    flux = hll_flux(hL, uL, hR, uR, g, h_dry)
    return flux.f_h, flux.f_q, upwind_transverse(flux.f_h, vL, vR)
