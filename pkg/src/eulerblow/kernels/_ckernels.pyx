# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; signatures and results match ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport floor, fabs, fmod, isfinite, NAN, INFINITY

cnp.import_array()

cdef enum:
    TRACE_END = 0
    TRACE_BLOWUP = 1
    TRACE_EXIT = 2
    TRACE_FAIL = 3


def minmod_reconstruct(v_in):
    cdef double[::1] v = np.ascontiguousarray(v_in, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0] - 3, j
    left_arr = np.empty(n)
    right_arr = np.empty(n)
    cdef double[::1] left = left_arr
    cdef double[::1] right = right_arr
    cdef double a, b, s_j, s_j1
    for j in range(n):
        # slope of ext cell j+1 and j+2
        a = v[j + 1] - v[j]
        b = v[j + 2] - v[j + 1]
        s_j = _minmod(a, b)
        a = b
        b = v[j + 3] - v[j + 2]
        s_j1 = _minmod(a, b)
        left[j] = v[j + 1] + 0.5 * s_j
        right[j] = v[j + 2] - 0.5 * s_j1
    return left_arr, right_arr


cdef inline double _minmod(double a, double b) nogil:
    if a * b <= 0.0:
        return 0.0
    if a > 0.0:
        return a if a < b else b
    return a if a > b else b


def llf_divergence(tau_l, tau_r, u_l, u_r, p_l, p_r, c_l, c_r, double dx):
    cdef double[::1] tl = np.ascontiguousarray(tau_l, dtype=np.float64)
    cdef double[::1] tr = np.ascontiguousarray(tau_r, dtype=np.float64)
    cdef double[::1] ul = np.ascontiguousarray(u_l, dtype=np.float64)
    cdef double[::1] ur = np.ascontiguousarray(u_r, dtype=np.float64)
    cdef double[::1] pl = np.ascontiguousarray(p_l, dtype=np.float64)
    cdef double[::1] pr = np.ascontiguousarray(p_r, dtype=np.float64)
    cdef double[::1] cl = np.ascontiguousarray(c_l, dtype=np.float64)
    cdef double[::1] cr = np.ascontiguousarray(c_r, dtype=np.float64)
    cdef Py_ssize_t nf = tl.shape[0], j
    dtau_arr = np.empty(nf - 1)
    du_arr = np.empty(nf - 1)
    cdef double[::1] dtau = dtau_arr
    cdef double[::1] du = du_arr
    cdef double a, ft_prev, fu_prev, ft, fu
    a = cl[0] if cl[0] > cr[0] else cr[0]
    ft_prev = -0.5 * (ul[0] + ur[0]) - 0.5 * a * (tr[0] - tl[0])
    fu_prev = 0.5 * (pl[0] + pr[0]) - 0.5 * a * (ur[0] - ul[0])
    for j in range(1, nf):
        a = cl[j] if cl[j] > cr[j] else cr[j]
        ft = -0.5 * (ul[j] + ur[j]) - 0.5 * a * (tr[j] - tl[j])
        fu = 0.5 * (pl[j] + pr[j]) - 0.5 * a * (ur[j] - ul[j])
        dtau[j - 1] = -(ft - ft_prev) / dx
        du[j - 1] = -(fu - fu_prev) / dx
        ft_prev = ft
        fu_prev = fu
    return dtau_arr, du_arr


cdef struct Ctx:
    const double* times
    Py_ssize_t nt
    Py_ssize_t nx
    double x_left
    double dx
    int periodic
    const double* c
    const double* a0
    const double* a1
    const double* a2
    Py_ssize_t hint


cdef int _fields(Ctx* ctx, double t, double x, double* out) nogil:
    """Bilinear interpolation into out[0..3]; returns 0 if x left the domain."""
    cdef Py_ssize_t k = ctx.hint, i0, i1, k1, nx = ctx.nx
    cdef double theta = 0.0, xi, fr, lo, hi
    if ctx.nt > 1:
        while k < ctx.nt - 2 and ctx.times[k + 1] < t:
            k += 1
        while k > 0 and ctx.times[k] > t:
            k -= 1
        theta = (t - ctx.times[k]) / (ctx.times[k + 1] - ctx.times[k])
        if theta < 0.0:
            theta = 0.0
        elif theta > 1.0:
            theta = 1.0
        k1 = k + 1
    else:
        k = 0
        k1 = 0
    ctx.hint = k
    xi = (x - ctx.x_left) / ctx.dx - 0.5
    if ctx.periodic:
        xi = fmod(xi, <double>nx)
        if xi < 0.0:
            xi += nx
        i0 = <Py_ssize_t>floor(xi)
        fr = xi - i0
        i0 = i0 % nx
        i1 = (i0 + 1) % nx
    else:
        if xi < 0.0 or xi > nx - 1:
            return 0
        i0 = <Py_ssize_t>floor(xi)
        if i0 > nx - 2:
            i0 = nx - 2
        fr = xi - i0
        i1 = i0 + 1
    cdef const double* f
    cdef const double* fs[4]
    fs[0] = ctx.c
    fs[1] = ctx.a0
    fs[2] = ctx.a1
    fs[3] = ctx.a2
    cdef int m
    for m in range(4):
        f = fs[m]
        lo = (1.0 - fr) * f[k * nx + i0] + fr * f[k * nx + i1]
        hi = (1.0 - fr) * f[k1 * nx + i0] + fr * f[k1 * nx + i1]
        out[m] = (1.0 - theta) * lo + theta * hi
    return 1


cdef inline void _rhs(double* vals, double v, double sign, int wmode, double* kx, double* kv) nogil:
    kx[0] = sign * vals[0]
    if wmode:
        kv[0] = -vals[1] * v * v - sign * vals[2] * v + vals[3]
    else:
        kv[0] = vals[1] + sign * vals[2] * v - vals[3] * v * v


cdef double _hermite_root(double w0, double w1, double m0, double m1) nogil:
    cdef double lo = 0.0, hi = 1.0, s, s2, s3, val
    cdef int it
    for it in range(80):
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


def trace_path(times, double x_left, double dx, int periodic, c, a0, a1, a2,
               double x0, double t0, double t_end, double v0, int sign, double dt,
               double switch_at, long max_steps):
    cdef double[::1] tm = np.ascontiguousarray(times, dtype=np.float64)
    cdef double[:, ::1] fc = np.ascontiguousarray(c, dtype=np.float64)
    cdef double[:, ::1] f0 = np.ascontiguousarray(a0, dtype=np.float64)
    cdef double[:, ::1] f1 = np.ascontiguousarray(a1, dtype=np.float64)
    cdef double[:, ::1] f2 = np.ascontiguousarray(a2, dtype=np.float64)
    cdef Ctx ctx
    ctx.times = &tm[0]
    ctx.nt = tm.shape[0]
    ctx.nx = fc.shape[1]
    ctx.x_left = x_left
    ctx.dx = dx
    ctx.periodic = periodic
    ctx.c = &fc[0, 0]
    ctx.a0 = &f0[0, 0]
    ctx.a1 = &f1[0, 0]
    ctx.a2 = &f2[0, 0]
    ctx.hint = 0

    ts_arr = np.empty(max_steps + 2)
    xs_arr = np.empty(max_steps + 2)
    vs_arr = np.empty(max_steps + 2)
    cdef double[::1] ts = ts_arr
    cdef double[::1] xs = xs_arr
    cdef double[::1] vs = vs_arr
    cdef double vals[4]
    cdef double t = t0, x = x0, v = v0, h, x_new, v_new, s, t_blow = NAN
    cdef double kx1, kx2, kx3, kx4, kv1, kv2, kv3, kv4, kv_end, dummy
    cdef double sg = <double>sign
    cdef double tol = 1e-14 * (fabs(t_end) if fabs(t_end) > 1.0 else 1.0)
    cdef int wmode = 0, status = TRACE_END
    cdef long n = 0, step
    cdef bint finished = False
    ts[0] = t
    xs[0] = x
    vs[0] = v
    with nogil:
        for step in range(max_steps):
            if t >= t_end - tol:
                finished = True
                break
            h = dt if dt < t_end - t else t_end - t
            if not _fields(&ctx, t, x, vals):
                status = TRACE_EXIT
                break
            _rhs(vals, v, sg, wmode, &kx1, &kv1)
            if not _fields(&ctx, t + 0.5 * h, x + 0.5 * h * kx1, vals):
                status = TRACE_EXIT
                break
            _rhs(vals, v + 0.5 * h * kv1, sg, wmode, &kx2, &kv2)
            if not _fields(&ctx, t + 0.5 * h, x + 0.5 * h * kx2, vals):
                status = TRACE_EXIT
                break
            _rhs(vals, v + 0.5 * h * kv2, sg, wmode, &kx3, &kv3)
            if not _fields(&ctx, t + h, x + h * kx3, vals):
                status = TRACE_EXIT
                break
            _rhs(vals, v + h * kv3, sg, wmode, &kx4, &kv4)
            x_new = x + h / 6.0 * (kx1 + 2 * kx2 + 2 * kx3 + kx4)
            v_new = v + h / 6.0 * (kv1 + 2 * kv2 + 2 * kv3 + kv4)
            if not (isfinite(x_new) and isfinite(v_new)):
                status = TRACE_FAIL
                break
            if wmode and v < 0.0 and v_new >= 0.0:
                if not _fields(&ctx, t + h, x_new, vals):
                    _fields(&ctx, t + h, x, vals)
                _rhs(vals, v_new, sg, 1, &dummy, &kv_end)
                s = _hermite_root(v, v_new, h * kv1, h * kv_end)
                t_blow = t + s * h
                n += 1
                ts[n] = t_blow
                xs[n] = x + s * (x_new - x)
                vs[n] = -INFINITY
                status = TRACE_BLOWUP
                break
            t = t + h
            x = x_new
            v = v_new
            n += 1
            ts[n] = t
            xs[n] = x
            vs[n] = 1.0 / v if wmode else v
            if not wmode and fabs(v) > switch_at:
                v = 1.0 / v
                wmode = 1
        else:
            finished = t >= t_end - tol
    if status == TRACE_END and not finished:
        status = TRACE_FAIL
    return ts_arr[:n + 1].copy(), xs_arr[:n + 1].copy(), vs_arr[:n + 1].copy(), status, t_blow
