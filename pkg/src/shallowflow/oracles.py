"""Analytic reference solutions and error norms used for verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .friction import FrictionLaw


@dataclass
class AnalyticSolution:
    kind: str
    params: dict = field(default_factory=dict)
    h_fn: Callable = None
    u_fn: Callable = None

    def h(self, x, t=0.0):
        return self.h_fn(np.asarray(x, dtype=float), t)

    def u(self, x, t=0.0):
        return self.u_fn(np.asarray(x, dtype=float), t)


def lake_at_rest(z_profile, eta: float) -> AnalyticSolution:
    """Still water at surface level ``eta`` over ``z_profile`` (callable of x or an array)."""
    if not np.isfinite(eta):
        raise ValueError("eta must be finite")

    def h_fn(x, t):
        z = z_profile(x) if callable(z_profile) else np.asarray(z_profile, dtype=float)
        return np.maximum(eta - z, 0.0)

    return AnalyticSolution("lake_at_rest", {"eta": eta}, h_fn, lambda x, t: np.zeros_like(x, dtype=float))


def ritter_solution(h_left: float, x0: float, g: float, x, t: float):
    """Dam break of depth ``h_left`` at ``x0`` onto a dry frictionless bed.

    Returns ``(h, u)`` at positions ``x`` and time ``t > 0``.
    """
    x = np.asarray(x, dtype=float)
    c0 = np.sqrt(g * h_left)
    xi = (x - x0) / t
    h = np.where(xi <= -c0, h_left, np.where(xi >= 2 * c0, 0.0, (2 * c0 - xi) ** 2 / (9 * g)))
    u = np.where(xi <= -c0, 0.0, np.where(xi >= 2 * c0, 0.0, (2.0 / 3.0) * (xi + c0)))
    return h, u


def ritter(h_left: float, x0: float, g: float = 9.81) -> AnalyticSolution:
    return AnalyticSolution("ritter_dry_dambreak", {"h_left": h_left, "x0": x0, "g": g},
                            lambda x, t: ritter_solution(h_left, x0, g, x, t)[0],
                            lambda x, t: ritter_solution(h_left, x0, g, x, t)[1])


def friction_slope(law: FrictionLaw, h, q, g):
    """Friction slope of steady 1D flow with discharge q at depth h."""
    if law.kind == "darcy_weisbach":
        return law.coefficient * q * np.abs(q) / (8.0 * g * h ** 3)
    if law.kind == "manning":
        return law.coefficient ** 2 * q * np.abs(q) / h ** (10.0 / 3.0)
    return 0.0 * h


def manufactured_steady(q0: float, h_profile: Callable, dh_profile: Callable,
                        friction: FrictionLaw = FrictionLaw(), g: float = 9.81,
                        domain: tuple[float, float] = (0.0, 10.0)):
    """Topography slope that makes ``(h_profile, q0)`` an exact steady state.

    From the steady momentum balance,
    ``z'(x) = (q0^2 / (g h^3) - 1) h'(x) - S_f(h, q0)``.
    Returns ``(z_slope, solution)``. Only subcritical profiles are accepted.
    """
    xs = np.linspace(domain[0], domain[1], 2001)
    hs = h_profile(xs)
    if np.any(hs <= 0):
        raise ValueError("depth profile must be positive")
    froude2 = q0 * q0 / (g * hs ** 3)
    if np.any(froude2 >= 1.0):
        raise ValueError("profile is not subcritical everywhere; transcritical flow is not supported")

    def z_slope(x):
        x = np.asarray(x, dtype=float)
        h = h_profile(x)
        return (q0 * q0 / (g * h ** 3) - 1.0) * dh_profile(x) - friction_slope(friction, h, q0, g)

    sol = AnalyticSolution("manufactured_steady", {"q0": q0, "g": g, "friction": friction},
                           lambda x, t: h_profile(x), lambda x, t: q0 / h_profile(x))
    return z_slope, sol


def integrate_topography(z_slope: Callable, x, x_ref: float = 0.0, z_ref: float = 0.0) -> np.ndarray:
    """Bed elevation at each ``x`` by adaptive quadrature of ``z_slope`` from ``x_ref``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.array([z_ref + quad(lambda s: float(z_slope(s)), x_ref, xi, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
                     for xi in x])


def error_norms(numerical, exact, dx: float = 1.0, dy: float = 1.0):
    """``(L1, L2, Linf)`` of the cellwise error, area-weighted by ``dx * dy``."""
    e = np.abs(np.asarray(numerical, dtype=float) - np.asarray(exact, dtype=float))
    area = dx * dy
    if e.size == 0:
        return 0.0, 0.0, 0.0
    return float(np.sum(e) * area), float(np.sqrt(np.sum(e * e) * area)), float(np.max(e))


def observed_orders(sizes, errors):
    """Pairwise convergence rates ``log(e_k / e_k+1) / log(n_k+1 / n_k)``."""
    sizes = np.asarray(sizes, dtype=float)
    errors = np.asarray(errors, dtype=float)
    return np.log(errors[:-1] / errors[1:]) / np.log(sizes[1:] / sizes[:-1])
