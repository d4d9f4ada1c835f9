"""Fused, compiled version of the per-axis flux sweep.

Same arithmetic as the numpy path in ``stepper._sweep_numpy`` (which is built
from the pointwise functions in ``reconstruction`` and ``riemann``), written
as one loop per row so the hot path does not allocate a temporary per
operation. The two are cross-checked in the test suite.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _minmod(a, b):
    if a > 0.0:
        return max(min(a, b), 0.0)
    return min(max(a, b), 0.0)


@njit(cache=True, nogil=True, error_model="numpy")
def sweep_rows(h, qn, qt, z, d, g, h_dry, order):
    """Flux tendencies along axis 1 for every row of padded ``(m, n + 4)`` arrays.

    Returns ``(dh, dqn, dqt, f_low, f_high, speed)``; ``speed`` is the per-row
    CFL speed ``max(|un|, |ut|) + sqrt(g h)`` over interior faces of wet cells.
    """
    m, npad = h.shape
    n = npad - 4
    nc = n + 2
    inv_d = 1.0 / d
    half_g = 0.5 * g

    dh = np.empty((m, n))
    dqn = np.empty((m, n))
    dqt = np.empty((m, n))
    f_low = np.empty(m)
    f_high = np.empty(m)
    speed = np.zeros(m)

    un = np.empty(npad)
    ut = np.empty(npad)
    eta = np.empty(npad)
    h_lo = np.empty(nc)
    h_hi = np.empty(nc)
    z_lo = np.empty(nc)
    z_hi = np.empty(nc)
    un_lo = np.empty(nc)
    un_hi = np.empty(nc)
    ut_lo = np.empty(nc)
    ut_hi = np.empty(nc)
    fh = np.empty(n + 1)
    fl = np.empty(n + 1)
    fr = np.empty(n + 1)
    ft = np.empty(n + 1)

    for r in range(m):
        for c in range(npad):
            hc = h[r, c]
            if hc >= h_dry:
                un[c] = qn[r, c] / hc
                ut[c] = qt[r, c] / hc
            else:
                un[c] = 0.0
                ut[c] = 0.0
            eta[c] = hc + z[r, c]

        for k in range(nc):
            c = k + 1
            hc = h[r, c]
            if order == 2 and hc >= h_dry:
                sh = 0.5 * _minmod(hc - h[r, c - 1], h[r, c + 1] - hc)
                se = 0.5 * _minmod(eta[c] - eta[c - 1], eta[c + 1] - eta[c])
                su = 0.5 * _minmod(un[c] - un[c - 1], un[c + 1] - un[c])
                sv = 0.5 * _minmod(ut[c] - ut[c - 1], ut[c + 1] - ut[c])
                lo = hc - sh
                hi = hc + sh
                h_lo[k] = lo
                h_hi[k] = hi
                z_lo[k] = (eta[c] - se) - lo
                z_hi[k] = (eta[c] + se) - hi
                un_lo[k] = un[c] - (hi / hc) * su
                un_hi[k] = un[c] + (lo / hc) * su
                ut_lo[k] = ut[c] - (hi / hc) * sv
                ut_hi[k] = ut[c] + (lo / hc) * sv
            elif order == 2:
                # dry cell: first order, z deduced from h + z as in the wet branch
                h_lo[k] = hc
                h_hi[k] = hc
                z_lo[k] = eta[c] - hc
                z_hi[k] = eta[c] - hc
                un_lo[k] = un[c]
                un_hi[k] = un[c]
                ut_lo[k] = ut[c]
                ut_hi[k] = ut[c]
            else:
                h_lo[k] = hc
                h_hi[k] = hc
                z_lo[k] = z[r, c]
                z_hi[k] = z[r, c]
                un_lo[k] = un[c]
                un_hi[k] = un[c]
                ut_lo[k] = ut[c]
                ut_hi[k] = ut[c]

        smax = 0.0
        for k in range(1, nc - 1):
            if h[r, k + 1] >= h_dry:
                s = max(abs(un_lo[k]), abs(ut_lo[k])) + math.sqrt(g * h_lo[k])
                if s > smax:
                    smax = s
                s = max(abs(un_hi[k]), abs(ut_hi[k])) + math.sqrt(g * h_hi[k])
                if s > smax:
                    smax = s
        speed[r] = smax

        for k in range(n + 1):
            hm = h_hi[k]
            hp = h_lo[k + 1]
            zm = z_hi[k]
            zp = z_lo[k + 1]
            zs = max(zm, zp)
            hL = max(hm + zm - zs, 0.0)
            hR = max(hp + zp - zs, 0.0)
            uL = un_hi[k]
            uR = un_lo[k + 1]
            if hL < h_dry and hR < h_dry:
                f_h = 0.0
                f_q = 0.0
            else:
                cL = math.sqrt(g * hL)
                cR = math.sqrt(g * hR)
                c1 = min(uL - cL, uR - cR)
                c2 = max(uL + cL, uR + cR)
                qL = hL * uL
                qR = hR * uR
                fqL = qL * uL + half_g * hL * hL
                fqR = qR * uR + half_g * hR * hR
                if c1 > 0.0:
                    f_h = qL
                    f_q = fqL
                elif c2 < 0.0:
                    f_h = qR
                    f_q = fqR
                else:
                    scale = c1 / (c2 - c1)
                    f_h = qL + scale * ((qL - qR) + c2 * (hR - hL))
                    f_q = fqL + scale * ((fqL - fqR) + c2 * (qR - qL))
            fh[k] = f_h
            fl[k] = f_q + half_g * (hm * hm - hL * hL)
            fr[k] = f_q + half_g * (hp * hp - hR * hR)
            ft[k] = f_h * (ut_hi[k] if f_h >= 0.0 else ut_lo[k + 1])

        for i in range(n):
            k = i + 1
            sc = -half_g * (h_lo[k] + h_hi[k]) * (z_hi[k] - z_lo[k])
            dh[r, i] = -(fh[k] - fh[k - 1]) * inv_d
            dqn[r, i] = -(fl[k] - fr[k - 1] - sc) * inv_d
            dqt[r, i] = -(ft[k] - ft[k - 1]) * inv_d
        f_low[r] = fh[0]
        f_high[r] = fh[n]

    return dh, dqn, dqt, f_low, f_high, speed


FRICTION_NONE, FRICTION_DARCY = 0, 1


@njit(cache=True, nogil=True, error_model="numpy")
def stage_update(h0, qx0, qy0, dh, dqx, dqy, dt, rain_step, soil, V, friction, friction_factor, h_dry,
                 negative_tolerance):
    """Pointwise part of one stage, mirroring ``stepper._stage_numpy`` operation by operation.

    ``rain_step`` is ``dt * R``; ``soil`` is ``(Ks, hf, dtheta)`` or empty;
    ``friction_factor`` is ``f / 8``; only Darcy-Weisbach friction is compiled.
    Returns ``(h, qx, qy, depth, ok)``; ``ok`` is False on a non-finite value or
    a depth below ``-negative_tolerance``, in which case the outputs are partial.
    """
    m, n = h0.shape
    h = np.empty((m, n))
    qx = np.empty((m, n))
    qy = np.empty((m, n))
    depth = np.zeros((m, n))
    for j in range(m):
        for i in range(n):
            hn = h0[j, i] + dt * dh[j, i]
            ux = qx0[j, i] + dt * dqx[j, i]
            uy = qy0[j, i] + dt * dqy[j, i]
            if not (math.isfinite(hn) and math.isfinite(ux) and math.isfinite(uy)):
                return h, qx, qy, depth, False
            if hn < 0.0:
                if hn < -negative_tolerance:
                    return h, qx, qy, depth, False
                hn = 0.0
            if rain_step > 0.0:
                hn = hn + rain_step
            if len(soil) == 3:
                Ks = soil[0]
                if Ks == 0.0:
                    cap = 0.0
                elif V[j, i] > 0.0:
                    zf = V[j, i] / soil[2]
                    cap = max(Ks * (1.0 + (soil[1] - hn) / zf), 0.0)
                else:
                    cap = math.inf
                dep = min(hn, dt * cap)
                hn = hn - dep
                depth[j, i] = dep
            if friction != FRICTION_NONE:
                ho = h0[j, i]
                if hn >= h_dry and ho >= h_dry:
                    norm = math.hypot(qx0[j, i], qy0[j, i])
                    rate = friction_factor * norm / (ho * hn)
                    div = 1.0 + dt * rate
                else:
                    div = 1.0 + dt * 0.0
                if hn >= h_dry:
                    ux = ux / div
                    uy = uy / div
                else:
                    ux = 0.0
                    uy = 0.0
            elif hn < h_dry:
                ux = 0.0
                uy = 0.0
            if not (math.isfinite(ux) and math.isfinite(uy)):
                return h, qx, qy, depth, False
            h[j, i] = hn
            qx[j, i] = ux
            qy[j, i] = uy
    return h, qx, qy, depth, True


SIDE_KINDS = {"wall": 0, "neumann": 1, "periodic": 2, "fixed": 3}


@njit(cache=True, inline="always")
def _ghost_source(kind, k, n, low):
    """Source index (relative to the first interior cell) of ghost layer ``k``."""
    if kind == 0:
        return min(k, n - 1) if low else n - 1 - min(k, n - 1)
    if kind == 1:
        return 0 if low else n - 1
    return n - 1 - (k % n) if low else k % n


@njit(cache=True)
def fill_ring(arr, kinds, sign_x, sign_y, ghosts):
    """Fill the ghost ring of one padded array in place, x sides first, then y.

    ``kinds`` holds the codes of ``SIDE_KINDS`` for (left, right, bottom, top);
    ``sign_x``/``sign_y`` multiply wall copies on the x/y sides.
    """
    m, npad = arr.shape
    nx = npad - 2 * ghosts
    ny = m - 2 * ghosts
    for side in range(2):
        kind = kinds[side]
        if kind == 3:
            continue
        low = side == 0
        sign = sign_x if kind == 0 else 1.0
        for k in range(ghosts):
            dst = ghosts - 1 - k if low else ghosts + nx + k
            src = ghosts + _ghost_source(kind, k, nx, low)
            for r in range(m):
                arr[r, dst] = -arr[r, src] if sign < 0.0 else arr[r, src]
    for side in range(2):
        kind = kinds[2 + side]
        if kind == 3:
            continue
        low = side == 0
        sign = sign_y if kind == 0 else 1.0
        for k in range(ghosts):
            dst = ghosts - 1 - k if low else ghosts + ny + k
            src = ghosts + _ghost_source(kind, k, ny, low)
            for c in range(npad):
                arr[dst, c] = -arr[src, c] if sign < 0.0 else arr[src, c]


@njit(cache=True, nogil=True)
def tendencies_2d(h, qx, qy, z, dx, dy, g, h_dry, order, ghosts):
    """Both sweeps of ``stepper.flux_tendencies`` in one call (single worker, ny > 1).

    Returns ``(dh, dqx, dqy, f_left, f_right, f_bottom, f_top, speed)``.
    """
    ny = h.shape[0] - 2 * ghosts
    nx = h.shape[1] - 2 * ghosts
    rows = slice(ghosts, ghosts + ny)
    cols = slice(ghosts, ghosts + nx)
    dh, dqx, dqy, f_lo, f_hi, speed = sweep_rows(h[rows], qx[rows], qy[rows], z[rows], dx, g, h_dry, order)
    dh_y, dqy_y, dqx_y, f_lo_y, f_hi_y, speed_y = sweep_rows(
        np.ascontiguousarray(h[:, cols].T), np.ascontiguousarray(qy[:, cols].T),
        np.ascontiguousarray(qx[:, cols].T), np.ascontiguousarray(z[:, cols].T), dy, g, h_dry, order)
    dh = dh + dh_y.T
    dqx = dqx + dqx_y.T
    dqy = dqy + dqy_y.T
    return dh, dqx, dqy, -f_lo, f_hi, -f_lo_y, f_hi_y, max(speed.max(), speed_y.max())
