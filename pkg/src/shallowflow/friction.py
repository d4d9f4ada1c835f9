"""Bed friction laws and their semi-implicit discharge update."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("none", "darcy_weisbach", "manning")


@dataclass(frozen=True)
class FrictionLaw:
    """``coefficient`` is f for Darcy-Weisbach and n [s m^-1/3] for Manning."""

    kind: str = "none"
    coefficient: float = 0.0

    def __post_init__(self):
        kind = self.kind.replace("-", "_")
        object.__setattr__(self, "kind", kind)
        if kind not in KINDS:
            raise ValueError(f"unknown friction law {self.kind!r}")
        if self.coefficient < 0:
            raise ValueError("friction coefficient must be >= 0")

    @property
    def active(self) -> bool:
        return self.kind != "none" and self.coefficient > 0

    def slope(self, h, u, v, g):
        """Friction slope (S_fx, S_fy) for depth h and velocity (u, v)."""
        speed = np.hypot(u, v)
        if self.kind == "darcy_weisbach":
            k = self.coefficient * speed / (8.0 * g * h)
        elif self.kind == "manning":
            k = self.coefficient ** 2 * speed / h ** (4.0 / 3.0)
        else:
            k = 0.0 * speed
        return k * u, k * v


def _divisor(law: FrictionLaw, q_old_norm, h_old, h_new, dt, g, h_dry):
    wet = (h_new >= h_dry) & (h_old >= h_dry)
    ho = np.where(wet, h_old, 1.0)
    hn = np.where(wet, h_new, 1.0)
    if law.kind == "darcy_weisbach":
        rate = (law.coefficient / 8.0) * q_old_norm / (ho * hn)
    elif law.kind == "manning":
        rate = g * law.coefficient ** 2 * q_old_norm / (ho * hn * np.cbrt(hn))
    else:
        rate = np.zeros_like(np.asarray(q_old_norm, dtype=float))
    return 1.0 + dt * np.where(wet, rate, 0.0)


def apply_friction_semi_implicit(h_new, q_star, q_old, h_old, law: FrictionLaw, dt, g=9.81, h_dry=1e-12):
    """``q_star / (1 + dt f/8 |q_old| / (h_old h_new))``; zero where ``h_new`` is dry."""
    div = _divisor(law, np.abs(q_old), h_old, h_new, dt, g, h_dry)
    q = np.where(np.asarray(h_new) >= h_dry, q_star / div, 0.0)
    return q[()] if q.ndim == 0 else q


def apply_friction_2d(h_new, qx_star, qy_star, qx_old, qy_old, h_old, law: FrictionLaw, dt,
                      g=9.81, h_dry=1e-12):
    """Both components share one divisor built from ``|q_old| = hypot(qx_old, qy_old)``."""
    norm = np.hypot(qx_old, qy_old)
    div = _divisor(law, norm, h_old, h_new, dt, g, h_dry)
    wet = np.asarray(h_new) >= h_dry
    qx = np.where(wet, qx_star / div, 0.0)
    qy = np.where(wet, qy_star / div, 0.0)
    if qx.ndim == 0:
        return qx[()], qy[()]
    return qx, qy
