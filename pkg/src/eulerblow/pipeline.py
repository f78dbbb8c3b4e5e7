"""End-to-end orchestration shared by the CLI subcommands."""

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import riccati, verify
from .config import dump_config
from .eos import check_all
from .eos.hypotheses import StateBox
from .reports import write_csv, write_json
from .solver import Physics, Trajectory, detect_blowup, initial_data, run, trace_characteristic
from .solver.grid import derived_fields
from .thermo import ThermoModel, compute_h

__all__ = ["Setup", "SimulationResult", "prepare", "simulate", "write_run", "run_check",
           "trace_run", "EXIT_CODES", "SNAPSHOT_COLUMNS"]

log = logging.getLogger(__name__)

EXIT_CODES = {"ran-to-horizon": 0, "blew-up": 10, "aborted": 20}
SNAPSHOT_COLUMNS = ("t", "x", "tau", "u", "c", "p", "h", "s", "r", "y", "q")
HEADROOM = 1.01
TRACE_FIELDS = ("c", "a0", "a1", "a2", "y", "q")


@dataclass
class Setup:
    """Everything fixed before time stepping starts."""

    config: object
    law: object
    profile: object
    grid: object
    physics: object
    tau0: np.ndarray
    u0: np.ndarray
    initial: dict
    bounds: verify.BoundConstants
    tau_bound: verify.TauMinBound
    threshold: riccati.ThresholdEstimate
    a2_bound: riccati.A2Bound


@dataclass
class SimulationResult:
    setup: Setup
    trajectory: Trajectory
    report: object
    monitors: verify.MonitorLog
    extras: dict

    @property
    def exit_code(self):
        return EXIT_CODES[self.trajectory.status]


def prepare(cfg, n_box=64):
    """Initial data, L^inf bounds, tau_min, thermo lattice, N, Y, Q and a2 constants."""
    law, profile, grid = cfg.make_law(), cfg.make_profile(), cfg.make_grid()
    tau0, u0 = initial_data(cfg.initial["family"], cfg.initial.get("params"), grid)
    x = grid.centers
    S_lo, S_hi = profile.S_range(grid.x_left, grid.x_right)

    h0 = compute_h(law, tau0, x, profile)
    s0, r0 = u0 + h0, u0 - h0
    k_ml, k_mr = profile.m_bounds(grid.x_left, grid.x_right)
    V = profile.total_variation(grid.x_left, grid.x_right)
    segments = len(profile.monotone_segments(grid.x_left, grid.x_right))
    c = law.constants
    bounds = verify.bound_constants(c.k, c.k1, c.k2, k_ml, k_mr,
                                    HEADROOM * float(np.max(np.abs(s0))),
                                    HEADROOM * float(np.max(np.abs(r0))), V, segments)
    S_samples = np.linspace(S_lo, S_hi, 9) if S_hi > S_lo else [S_lo]
    tau_bound = verify.tau_min_bound(law, bounds.h_max, S_samples)

    model = ThermoModel(law, profile, tau_range=(tau_bound.tau_min, 4.0 * float(np.max(tau0))),
                        S_range=(S_lo, S_hi), tau_points=int(cfg.thermo.get("tau_points", 257)),
                        S_points=int(cfg.thermo.get("S_points", 33)),
                        mu_convention=cfg.thermo.get("mu_convention", "fixed-tau"))
    physics = Physics(law, profile, grid, model)
    box = StateBox(tau_bound.tau_min, float(np.max(tau0)), grid.x_left, grid.x_right)
    threshold = riccati.estimate_N(law, profile, box, n=n_box, model=model, tau_data=tau0)

    d0 = derived_fields(tau0, u0, physics)
    Y, Q = riccati.envelopes(threshold.N, d0["y"], d0["q"])
    a2b = riccati.a2_growth_constants(law, tau_bound.tau_min, tau0, physics.S_cell, Y, Q)
    threshold.Y, threshold.Q = Y, Q
    threshold.k14, threshold.k15, threshold.k16, threshold.k17 = a2b.k14, a2b.k15, a2b.k16, a2b.k17
    return Setup(cfg, law, profile, grid, physics, tau0, u0, d0, bounds, tau_bound, threshold, a2b)


def simulate(cfg, out_dir=None, n_box=64):
    """Run the full pipeline; write the run directory when ``out_dir`` is given."""
    st = prepare(cfg, n_box)
    opts = cfg.solver
    traj = run(st.physics, st.tau0, st.u0, cfg.horizon_time, cfl=cfg.cfl, sentinel=cfg.sentinel,
               tau_floor=opts.get("tau_floor"), trace_every=int(opts.get("trace_every", 4)),
               riccati_trigger=bool(opts.get("riccati_trigger", True)),
               max_steps=int(opts.get("max_steps", 200000)))
    log.info("run finished: %s after %d steps", traj.status, traj.info["steps"])
    report = detect_blowup(traj, st.threshold.N, cfg.eps, st.a2_bound)
    monitors = verify.monitor_run(traj, st.physics, st.bounds, st.tau_bound,
                                  st.threshold.Y, st.threshold.Q, st.a2_bound)
    if monitors.violations:
        log.warning("proved-bound monitors violated: %s", ", ".join(monitors.violations))

    # N was estimated for tau in [tau_min, max tau0]; re-estimate if the run left that box
    extras = {}
    tau_hi = float(np.max(traj.tau))
    if tau_hi > st.threshold.box.tau_max * (1 + 1e-12):
        box = StateBox(st.tau_bound.tau_min, tau_hi, st.grid.x_left, st.grid.x_right)
        est = riccati.estimate_N(st.law, st.profile, box, n=n_box, model=st.physics.model)
        extras["N_observed_box"] = est.to_dict()
    result = SimulationResult(st, traj, report, monitors, extras)
    if out_dir is not None:
        write_run(result, out_dir)
    return result


def _report_dict(res):
    st, traj = res.setup, res.trajectory
    return {
        "report": res.report.to_dict(),
        "threshold": st.threshold.to_dict(),
        "envelopes": {"Y": st.threshold.Y, "Q": st.threshold.Q},
        "a2_bound": st.a2_bound.to_dict(),
        "blowup_bound": {"eps": res.report.eps, "criterion": res.report.criterion,
                         "threshold_value": -(1 + res.report.eps) * res.report.N,
                         "predicted_T_bound": res.report.predicted_T_bound},
        "bound_constants": st.bounds.to_dict(),
        "tau_min": st.tau_bound.to_dict(),
        "run": {"status": traj.status, "abort": traj.abort, "blowup": traj.blowup,
                "steps": traj.info.get("steps"), "tau_floor": traj.info.get("tau_floor"),
                "sentinel": traj.info.get("sentinel"), "cfl": traj.info.get("cfl"),
                "seeds": traj.info.get("seeds"), "final_time": float(traj.times[-1])},
        "post_run": res.extras,
    }


def _snapshot_rows(traj, stride):
    levels = list(range(0, traj.n_levels, stride))
    if levels[-1] != traj.n_levels - 1:
        levels.append(traj.n_levels - 1)
    x = traj.grid.centers
    blocks = []
    for k in levels:
        cols = [np.full_like(x, traj.times[k]), x, traj.tau[k], traj.u[k]]
        cols += [traj.fields[name][k] for name in SNAPSHOT_COLUMNS[4:]]
        blocks.append(np.column_stack(cols))
    return np.vstack(blocks)


def write_run(res, out_dir):
    """Write config, snapshots, blow-up report, monitors and the stored trajectory."""
    os.makedirs(out_dir, exist_ok=True)
    cfg = res.setup.config
    with open(os.path.join(out_dir, "config.yaml"), "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))
    write_csv(os.path.join(out_dir, "snapshots.csv"), SNAPSHOT_COLUMNS,
              _snapshot_rows(res.trajectory, int(cfg.output.get("stride", 1))))
    write_json(os.path.join(out_dir, "blowup_report.json"), _report_dict(res))
    write_json(os.path.join(out_dir, "monitors.json"), res.monitors.to_json_dict())
    header, rows = res.monitors.rows()
    write_csv(os.path.join(out_dir, "monitors.csv"), header, rows)
    res.trajectory.save(os.path.join(out_dir, "trajectory.npz"), TRACE_FIELDS)


def run_check(cfg):
    """All hypothesis checkers on the configured box; returns the reports."""
    law, profile = cfg.make_law(), cfg.make_profile()
    return check_all(law, profile, cfg.check_box(), cfg.check_samples)


def trace_run(run_dir, seeds=None, direction="forward", out_dir=None):
    """Trace characteristics through a stored run; writes one CSV per seed.

    Without seeds the path starts at ``argmin y0`` (forward) or ``argmin q0``
    (backward).
    """
    traj = Trajectory.load(os.path.join(run_dir, "trajectory.npz"))
    key = "y" if direction == "forward" else "q"
    if not seeds:
        seeds = [float(traj.grid.centers[int(np.argmin(traj.fields[key][0]))])]
    out_dir = out_dir or os.path.join(run_dir, "traces")
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for i, x0 in enumerate(seeds):
        path = trace_characteristic(traj, float(x0), direction)
        rows = np.column_stack([path.t, path.x, path.value, path.value_fd, path.a0, path.a1, path.a2])
        fname = os.path.join(out_dir, f"trace_{direction}_{i:03d}.csv")
        write_csv(fname, ["t", "x", key, f"{key}_fd", "a0", "a1", "a2"], rows)
        paths.append((fname, path))
    return paths
