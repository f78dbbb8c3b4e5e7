"""Characteristic tracing with the along-path Riccati ODE."""

from dataclasses import dataclass

import numpy as np

from .. import kernels

__all__ = ["CharacteristicPath", "trace_characteristic", "interpolate_field", "TRACE_STATUS"]

TRACE_STATUS = {0: "reached-end", 1: "blew-up", 2: "left-domain", 3: "failed"}
_SWITCH_FACTOR = 8.0


@dataclass
class CharacteristicPath:
    """Samples of a traced characteristic.

    ``value`` is y (forward) or q (backward) from the Riccati ODE and
    ``value_fd`` is the same quantity read from the field differences.
    """

    direction: str
    t: np.ndarray
    x: np.ndarray
    value: np.ndarray
    value_fd: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    status: str
    t_blowup: float

    @property
    def truncated(self):
        return self.status == "left-domain"

    def agreement_window(self, rel_tol=0.05, growth=10.0):
        """Largest t up to which ``|value - value_fd| <= rel_tol |value_fd|``.

        Only samples before ``|value_fd|`` first reaches ``growth`` times its
        initial magnitude are considered. Returns ``(t_end, worst_rel, reached)``
        where ``reached`` says whether the growth cutoff was hit.
        """
        fd = self.value_fd
        ok = np.isfinite(self.value) & np.isfinite(fd)
        ref = abs(fd[0]) if fd.size else 0.0
        cut = np.flatnonzero(np.abs(fd) >= growth * ref) if ref > 0 else np.array([], dtype=int)
        stop = int(cut[0]) if cut.size else int(np.sum(ok))
        idx = np.arange(stop)[ok[:stop]]
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.abs(self.value[idx] - fd[idx]) / np.abs(fd[idx])
        rel = np.where(np.isfinite(rel), rel, 0.0)
        bad = np.flatnonzero(rel > rel_tol)
        t_end = float(self.t[idx[bad[0]]]) if bad.size else float(self.t[idx[-1]] if idx.size else 0.0)
        return t_end, float(np.max(rel) if rel.size else 0.0), bool(cut.size)


def interpolate_field(times, field, grid, t, x):
    """Bilinear (t, x) interpolation of a stacked field ``(levels, cells)``.

    Returns nan where ``x`` lies outside the cell-centre range of an
    outflow grid.
    """
    times = np.asarray(times, dtype=float)
    field = np.asarray(field, dtype=float)
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    n = grid.n_cells
    if times.size > 1:
        k = np.clip(np.searchsorted(times, t, side="right") - 1, 0, times.size - 2)
        theta = np.clip((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0)
        k1 = k + 1
    else:
        k = np.zeros(t.shape, dtype=int)
        k1 = k
        theta = np.zeros(t.shape)
    xi = (x - grid.x_left) / grid.dx - 0.5
    if grid.periodic:
        xi = np.mod(xi, n)
        i0 = np.floor(xi).astype(int)
        fr = xi - i0
        i0 %= n
        i1 = (i0 + 1) % n
        out_of = np.zeros(x.shape, dtype=bool)
    else:
        out_of = (xi < 0) | (xi > n - 1)
        xi = np.clip(xi, 0, n - 1)
        i0 = np.minimum(np.floor(xi).astype(int), n - 2)
        fr = xi - i0
        i1 = i0 + 1
    lo = (1 - fr) * field[k, i0] + fr * field[k, i1]
    hi = (1 - fr) * field[k1, i0] + fr * field[k1, i1]
    return np.where(out_of, np.nan, (1 - theta) * lo + theta * hi)


def _trace_arrays(times, grid, c, a0, a1, a2, x0, direction, v0, t_end, dt, backend=None):
    sign = 1 if direction == "forward" else -1
    k = kernels if backend is None else kernels.get_backend(backend)
    switch_at = _SWITCH_FACTOR * max(abs(v0), 1e-6)
    max_steps = int(np.ceil((t_end - times[0]) / dt)) + 16
    return k.trace_path(np.ascontiguousarray(times, dtype=float), grid.x_left, grid.dx,
                        int(grid.periodic), c, a0, a1, a2, float(x0), float(times[0]),
                        float(t_end), float(v0), sign, float(dt), float(switch_at), max_steps)


def trace_characteristic(trajectory, x0, direction="forward", dt=None, t_end=None,
                         coefficient_override=None, v0=None, backend=None):
    """Trace ``dx/dt = +-c`` from ``(t0, x0)`` with the Riccati ODE for y or q.

    Parameters
    ----------
    trajectory : Trajectory
        Stored run (all time levels).
    direction : {"forward", "backward"}
        Forward paths carry y, backward paths carry q.
    dt : float, optional
        Tracing step; defaults to half the smallest stored step.
    coefficient_override : dict, optional
        Constant ``a0``, ``a1``, ``a2`` (and optionally ``c``) replacing the
        field coefficients.
    v0 : float, optional
        Initial y/q; defaults to the field value at ``x0``.
    """
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    g = trajectory.grid
    if not (g.x_left <= x0 <= g.x_right):
        raise ValueError(f"seed x0={x0} lies outside [{g.x_left}, {g.x_right}]")
    times = trajectory.times
    fields = trajectory.fields
    key = "y" if direction == "forward" else "q"
    c, a0, a1, a2 = (fields[k] for k in ("c", "a0", "a1", "a2"))
    if coefficient_override is not None:
        ov = coefficient_override
        a0 = np.full_like(a0, float(ov.get("a0", 0.0)))
        a1 = np.full_like(a1, float(ov.get("a1", 0.0)))
        a2 = np.full_like(a2, float(ov["a2"]))
        if "c" in ov:
            c = np.full_like(c, float(ov["c"]))
    if t_end is None:
        t_end = float(times[-1])
    if dt is None:
        steps = np.diff(times)
        dt = 0.5 * float(np.min(steps)) if steps.size else 1e-3
    if v0 is None:
        v0 = float(interpolate_field(times, fields[key], g, times[0], x0))
    t, x, v, status, t_blow = _trace_arrays(times, g, c, a0, a1, a2, x0, direction, v0, t_end, dt, backend)
    fd = interpolate_field(times, fields[key], g, t, x)
    along = [interpolate_field(times, f, g, t, x) for f in (a0, a1, a2)]
    return CharacteristicPath(direction, t, x, v, fd, *along, TRACE_STATUS[int(status)], float(t_blow))
