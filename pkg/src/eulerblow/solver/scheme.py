"""MUSCL/local Lax-Friedrichs finite-volume scheme for the Lagrangian p-system.

``tau_t - u_x = 0``, ``u_t + p(tau, S(x))_x = 0``. Interface pressures use
the entropy at the interface coordinate on both sides, so a constant
isentropic state is an exact fixed point and the update is conservative.
Time stepping is two-stage strong-stability-preserving Runge-Kutta.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import kernels
from .characteristics import _trace_arrays, interpolate_field
from .grid import FieldState, derived_fields

__all__ = ["SolverAbort", "Trajectory", "rhs", "step_field", "stable_dt", "run"]

STATUS_HORIZON = "ran-to-horizon"
STATUS_BLOWUP = "blew-up"
STATUS_ABORTED = "aborted"


class SolverAbort(RuntimeError):
    """Raised when a stage produces NaN or tau below the floor."""

    def __init__(self, reason, t, x):
        super().__init__(f"{reason} at t={t:.6g}, x={x:.6g}")
        self.reason = reason
        self.t = t
        self.x = x


def _pad(v, periodic):
    if periodic:
        return np.concatenate([v[-2:], v, v[:2]])
    return np.concatenate([[v[0], v[0]], v, [v[-1], v[-1]]])


def rhs(tau, u, physics):
    """Semi-discrete rates ``(dtau/dt, du/dt)``."""
    g = physics.grid
    tl, tr = kernels.minmod_reconstruct(_pad(tau, g.periodic))
    ul, ur = kernels.minmod_reconstruct(_pad(u, g.periodic))
    law = physics.law
    Pl = law.partials(tl, physics.S_face)
    Pr = law.partials(tr, physics.S_face)
    cl = np.sqrt(np.maximum(-Pl.p_tau, 0.0))
    cr = np.sqrt(np.maximum(-Pr.p_tau, 0.0))
    return kernels.llf_divergence(tl, tr, ul, ur, Pl.p, Pr.p, cl, cr, g.dx)


def _guard(tau, u, physics, t, tau_floor):
    bad = ~np.isfinite(tau) | ~np.isfinite(u)
    if np.any(bad):
        raise SolverAbort("non-finite state", t, float(physics.grid.centers[np.argmax(bad)]))
    if np.any(tau < tau_floor):
        i = int(np.argmin(tau))
        raise SolverAbort(f"tau={tau[i]:.3g} below floor {tau_floor:.3g}", t, float(physics.grid.centers[i]))


def step_field(state, dt, physics, tau_floor=0.0):
    """One SSP-RK2 step; returns a new :class:`FieldState` without derived fields."""
    t = state.t
    dtau, du = rhs(state.tau, state.u, physics)
    tau1 = state.tau + dt * dtau
    u1 = state.u + dt * du
    _guard(tau1, u1, physics, t + dt, tau_floor)
    dtau, du = rhs(tau1, u1, physics)
    tau2 = 0.5 * (state.tau + tau1 + dt * dtau)
    u2 = 0.5 * (state.u + u1 + dt * du)
    _guard(tau2, u2, physics, t + dt, tau_floor)
    return FieldState(t + dt, tau2, u2)


def stable_dt(tau, physics, cfl):
    c = physics.law.sound_speed(tau, physics.S_cell)
    return cfl * physics.grid.dx / float(np.max(c))


@dataclass
class Trajectory:
    """All stored time levels of a run with their derived fields."""

    grid: object
    times: np.ndarray
    tau: np.ndarray
    u: np.ndarray
    fields: dict
    status: str = STATUS_HORIZON
    abort: dict | None = None
    blowup: dict | None = None
    info: dict = field(default_factory=dict)

    @property
    def n_levels(self):
        return self.times.size

    def level(self, k):
        return FieldState(float(self.times[k]), self.tau[k], self.u[k],
                          {name: f[k] for name, f in self.fields.items()})

    def save(self, path, fields=None):
        """Compressed npz; ``fields`` restricts the stored derived fields."""
        keep = self.fields if fields is None else {k: self.fields[k] for k in fields}
        arrays = {f"field_{k}": v for k, v in keep.items()}
        np.savez_compressed(path, times=self.times, tau=self.tau, u=self.u,
                 grid=np.array([self.grid.x_left, self.grid.x_right, self.grid.n_cells,
                                1.0 if self.grid.periodic else 0.0]),
                 status=np.array(self.status), **arrays)

    @classmethod
    def load(cls, path):
        from .grid import Grid

        with np.load(path, allow_pickle=False) as z:
            gl, gr, n, per = z["grid"]
            grid = Grid(float(gl), float(gr), int(n), "periodic" if per else "outflow")
            fields = {k[6:]: z[k] for k in z.files if k.startswith("field_")}
            return cls(grid, z["times"], z["tau"], z["u"], fields, str(z["status"]))


class _Buffer:
    """Row-appendable 2-D array with amortised doubling."""

    def __init__(self, first):
        first = np.asarray(first, dtype=float)
        self._data = np.empty((64,) + first.shape)
        self._data[0] = first
        self.n = 1

    def append(self, row):
        if self.n == self._data.shape[0]:
            grown = np.empty((2 * self.n,) + self._data.shape[1:])
            grown[: self.n] = self._data
            self._data = grown
        self._data[self.n] = row
        self.n += 1

    def view(self):
        return self._data[: self.n]


def _seed(field0, grid, direction):
    i = int(np.argmin(field0))
    return float(grid.centers[i]), float(field0[i]), direction


def run(physics, tau0, u0, horizon, cfl=0.4, tau_floor=None, sentinel=None,
        riccati_trigger=True, trace_every=4, stop_on_blowup=True, max_steps=200000):
    """Advance to ``horizon``, abort, or detected blow-up.

    Blow-up triggers, whichever fires first:

    * ``gradient-sentinel``: ``max(|y|, |q|)`` reaches ``sentinel``
      (default ``1e3 max(|y0|, |q0|)``);
    * ``riccati-forward`` / ``riccati-backward``: the Riccati ODE integrated
      along the characteristic seeded at ``argmin y0`` (``argmin q0``) blows
      up, with ``1/y`` crossing zero.

    Returns
    -------
    Trajectory
        ``blowup`` holds ``time``, ``bracket``, ``trigger``, ``x`` and
        ``fd_growth`` when a trigger fired.
    """
    g = physics.grid
    tau = np.array(tau0, dtype=float)
    u = np.array(u0, dtype=float)
    if tau_floor is None:
        tau_floor = 1e-4 * float(np.min(tau))
    d0 = derived_fields(tau, u, physics)
    scale0 = max(float(np.max(np.abs(d0["y"]))), float(np.max(np.abs(d0["q"]))))
    if sentinel is None:
        sentinel = 1e3 * scale0 if scale0 > 0 else np.inf
    seeds = []
    if riccati_trigger:
        for key, direction in (("y", "forward"), ("q", "backward")):
            if np.min(d0[key]) < 0:
                seeds.append(_seed(d0[key], g, direction))
    times = _Buffer(0.0)
    taus, us = _Buffer(tau), _Buffer(u)
    fields = {k: _Buffer(v) for k, v in d0.items()}
    state = FieldState(0.0, tau, u)
    status, abort, blowup = STATUS_HORIZON, None, None
    n = 0

    def stacked():
        return times.view(), {k: v.view() for k, v in fields.items()}

    while state.t < horizon * (1 - 1e-14):
        if n >= max_steps:
            status, abort = STATUS_ABORTED, {"reason": "step cap reached", "t": state.t, "x": None}
            break
        dt = min(stable_dt(state.tau, physics, cfl), horizon - state.t)
        try:
            state = step_field(state, dt, physics, tau_floor)
        except SolverAbort as exc:
            status, abort = STATUS_ABORTED, {"reason": exc.reason, "t": exc.t, "x": exc.x}
            break
        n += 1
        d = derived_fields(state.tau, state.u, physics)
        times.append(state.t)
        taus.append(state.tau)
        us.append(state.u)
        for k, v in d.items():
            fields[k].append(v)
        grad = max(float(np.max(np.abs(d["y"]))), float(np.max(np.abs(d["q"]))))
        if grad >= sentinel:
            i = int(np.argmax(np.maximum(np.abs(d["y"]), np.abs(d["q"]))))
            blowup = {"trigger": "gradient-sentinel", "time": state.t,
                      "bracket": [float(times.view()[-2]), state.t], "x": float(g.centers[i]),
                      "fd_growth": grad / scale0 if scale0 > 0 else np.inf}
        elif seeds and (n % trace_every == 0 or state.t >= horizon * (1 - 1e-14)):
            tt, ff = stacked()
            dt_tr = 0.5 * float(np.min(np.diff(tt)))
            for x0, v0, direction in seeds:
                _, xs, _, st, tb = _trace_arrays(tt, g, ff["c"], ff["a0"], ff["a1"], ff["a2"],
                                                 x0, direction, v0, tt[-1], dt_tr)
                if st == 1 and (blowup is None or tb < blowup["time"]):
                    k = int(np.clip(np.searchsorted(tt, tb) - 1, 0, tt.size - 2))
                    blowup = {"trigger": f"riccati-{direction}", "time": float(tb),
                              "bracket": [float(tt[k]), float(tt[k + 1])], "x": float(xs[-1]),
                              "fd_growth": grad / scale0 if scale0 > 0 else np.inf}
        if blowup is not None:
            status = STATUS_BLOWUP
            if stop_on_blowup:
                break
    tt = times.view().copy()
    ff = {k: v.view().copy() for k, v in fields.items()}
    traj = Trajectory(g, tt, taus.view().copy(), us.view().copy(), ff, status, abort, blowup)
    traj.info = {"tau_floor": tau_floor, "sentinel": float(sentinel), "cfl": cfl, "steps": n,
                 "seeds": [{"x": s[0], "value": s[1], "direction": s[2]} for s in seeds]}
    if blowup is not None:
        key = "y" if blowup["trigger"] != "riccati-backward" else "q"
        v_at = interpolate_field(tt, ff[key], g, blowup["time"], blowup["x"])
        blowup["field_value_at_detection"] = float(v_at)
    return traj
