"""Pure-Python reference implementations of the hot kernels.

The compiled module ``_ckernels`` mirrors these signatures exactly; tests
run both against each other.
"""

import math

import numpy as np

__all__ = ["minmod_reconstruct", "llf_divergence", "trace_path"]

TRACE_END, TRACE_BLOWUP, TRACE_EXIT, TRACE_FAIL = 0, 1, 2, 3


def minmod_reconstruct(v):
    """Face states from a ghost-padded array (two ghosts per side).

    Returns ``(left, right)`` of length ``len(v) - 3``: the traces on either
    side of each interface bounding a real cell.
    """
    v = np.asarray(v, dtype=float)
    a = v[1:-1] - v[:-2]
    b = v[2:] - v[1:-1]
    slope = np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)
    left = v[1:-2] + 0.5 * slope[:-1]
    right = v[2:-1] - 0.5 * slope[1:]
    return left, right


def llf_divergence(tau_l, tau_r, u_l, u_r, p_l, p_r, c_l, c_r, dx):
    """Cell rates ``(dtau/dt, du/dt)`` from local Lax-Friedrichs interface fluxes.

    Fluxes of the p-system are ``-u`` for tau and ``p`` for u.
    """
    a = np.maximum(c_l, c_r)
    f_tau = -0.5 * (u_l + u_r) - 0.5 * a * (tau_r - tau_l)
    f_u = 0.5 * (p_l + p_r) - 0.5 * a * (u_r - u_l)
    return -(f_tau[1:] - f_tau[:-1]) / dx, -(f_u[1:] - f_u[:-1]) / dx


def _locate(times, t, k):
    n = len(times)
    if n == 1:
        return 0, 0.0
    while k < n - 2 and times[k + 1] < t:
        k += 1
    while k > 0 and times[k] > t:
        k -= 1
    theta = (t - times[k]) / (times[k + 1] - times[k])
    return k, min(max(theta, 0.0), 1.0)


def _fields(fields, times, nx, x_left, dx, periodic, t, x, hint):
    """Bilinear (x, t) interpolation of the four coefficient fields."""
    k, theta = _locate(times, t, hint)
    xi = (x - x_left) / dx - 0.5
    if periodic:
        xi = xi % nx
        i0 = int(math.floor(xi))
        fr = xi - i0
        i0 %= nx
        i1 = (i0 + 1) % nx
    else:
        if xi < 0.0 or xi > nx - 1:
            return None, k
        i0 = min(int(math.floor(xi)), nx - 2)
        fr = xi - i0
        i1 = i0 + 1
    k1 = k + 1 if len(times) > 1 else k
    out = []
    for f in fields:
        lo = (1.0 - fr) * f[k, i0] + fr * f[k, i1]
        hi = (1.0 - fr) * f[k1, i0] + fr * f[k1, i1]
        out.append((1.0 - theta) * lo + theta * hi)
    return out, k


def _rhs(vals, v, sign, wmode):
    c, a0, a1, a2 = vals
    if wmode:
        return sign * c, -a0 * v * v - sign * a1 * v + a2
    return sign * c, a0 + sign * a1 * v - a2 * v * v


def _hermite_root(w0, w1, m0, m1):
    """Root in (0, 1] of the cubic Hermite interpolant with w0 < 0 <= w1."""
    lo, hi = 0.0, 1.0
    for _ in range(80):
        s = 0.5 * (lo + hi)
        s2 = s * s
        s3 = s2 * s
        val = ((2 * s3 - 3 * s2 + 1) * w0 + (s3 - 2 * s2 + s) * m0
               + (-2 * s3 + 3 * s2) * w1 + (s3 - s2) * m1)
        if val < 0.0:
            lo = s
        else:
            hi = s
    return 0.5 * (lo + hi)


def trace_path(times, x_left, dx, periodic, c, a0, a1, a2, x0, t0, t_end, v0, sign, dt,
               switch_at, max_steps):
    """Integrate ``dx/dt = sign c`` with the matching Riccati ODE by classical RK4.

    The gradient variable ``v`` (y forward, q backward) obeys
    ``v' = a0 + sign a1 v - a2 v^2``. Once ``|v| > switch_at`` the
    reciprocal ``w = 1/v`` is integrated instead; blow-up is the crossing of
    ``w`` from negative to non-negative, located by cubic Hermite bisection.

    Returns
    -------
    t, x, v : ndarray
        Samples along the path (``v = -inf`` at a located blow-up).
    status : int
        0 reached ``t_end``, 1 blew up, 2 left the domain, 3 numerical failure.
    t_blow : float
        Blow-up time (nan unless status is 1).
    """
    times = np.asarray(times, dtype=float)
    flds = [np.asarray(f, dtype=float) for f in (c, a0, a1, a2)]
    nx = flds[0].shape[1]
    ts, xs, vs = [t0], [x0], [v0]
    t, x, v = float(t0), float(x0), float(v0)
    wmode = False
    hint = 0
    status, t_blow = TRACE_END, math.nan
    for _ in range(int(max_steps)):
        if t >= t_end - 1e-14 * max(1.0, abs(t_end)):
            break
        h = min(dt, t_end - t)
        vals, hint = _fields(flds, times, nx, x_left, dx, periodic, t, x, hint)
        if vals is None:
            status = TRACE_EXIT
            break
        kx1, kv1 = _rhs(vals, v, sign, wmode)
        vals, hint = _fields(flds, times, nx, x_left, dx, periodic, t + 0.5 * h, x + 0.5 * h * kx1, hint)
        if vals is None:
            status = TRACE_EXIT
            break
        kx2, kv2 = _rhs(vals, v + 0.5 * h * kv1, sign, wmode)
        vals, hint = _fields(flds, times, nx, x_left, dx, periodic, t + 0.5 * h, x + 0.5 * h * kx2, hint)
        if vals is None:
            status = TRACE_EXIT
            break
        kx3, kv3 = _rhs(vals, v + 0.5 * h * kv2, sign, wmode)
        vals, hint = _fields(flds, times, nx, x_left, dx, periodic, t + h, x + h * kx3, hint)
        if vals is None:
            status = TRACE_EXIT
            break
        kx4, kv4 = _rhs(vals, v + h * kv3, sign, wmode)
        x_new = x + h / 6.0 * (kx1 + 2 * kx2 + 2 * kx3 + kx4)
        v_new = v + h / 6.0 * (kv1 + 2 * kv2 + 2 * kv3 + kv4)
        if not (math.isfinite(x_new) and math.isfinite(v_new)):
            status = TRACE_FAIL
            break
        if wmode and v < 0.0 <= v_new:
            vals, hint = _fields(flds, times, nx, x_left, dx, periodic, t + h, x_new, hint)
            if vals is None:
                vals, _ = _fields(flds, times, nx, x_left, dx, periodic, t + h, x, hint)
            _, kv_end = _rhs(vals, v_new, sign, True)
            s = _hermite_root(v, v_new, h * kv1, h * kv_end)
            t_blow = t + s * h
            ts.append(t_blow)
            xs.append(x + s * (x_new - x))
            vs.append(-math.inf)
            status = TRACE_BLOWUP
            break
        t, x, v = t + h, x_new, v_new
        ts.append(t)
        xs.append(x)
        vs.append(1.0 / v if wmode else v)
        if not wmode and abs(v) > switch_at:
            v = 1.0 / v
            wmode = True
    else:
        if t < t_end - 1e-14 * max(1.0, abs(t_end)):
            status = TRACE_FAIL
    return np.array(ts), np.array(xs), np.array(vs), status, t_blow
