"""Numerical certification of the proved bounds and runtime monitors.

* :func:`check_pressure_sandwich` verifies ``p <= c h <= k p`` on a box.
* :func:`bound_constants` evaluates the constant cascade behind the
  ``L^inf`` bounds ``|s| <= n_s``, ``|r| <= n_r``.
* :func:`tau_min_bound` inverts ``int_tau^1 c = h_max`` for the density bound.
* :func:`monitor_run` re-checks every bound at every stored level of a run.
"""

import math
import warnings
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np
from scipy import optimize

from .eos.hypotheses import sample_box
from .quadrature import finite_integral
from .riccati import a2_closed, quarter_integral
from .solver.grid import centered_difference
from .thermo import ThermoModel

__all__ = [
    "MONITOR_SLACK",
    "SandwichViolation",
    "SandwichReport",
    "BoundConstants",
    "TauMinBound",
    "MonitorCheck",
    "MonitorLog",
    "check_pressure_sandwich",
    "bound_constants",
    "tau_min_bound",
    "monitor_run",
    "monitor_manifest",
]

MONITOR_SLACK = 1e-3


class SandwichViolation(ValueError):
    """``p > c h`` somewhere: inconsistent with (H1)-(H2), so an eos bug."""


@dataclass
class SandwichReport:
    lower_margin: float
    upper_margin: float
    k_tightest: float
    k_declared: float
    passed: bool
    witness_lower: dict
    witness_upper: dict


def check_pressure_sandwich(law, profile, box, n=64, k=None, model=None):
    """Check ``p <= c h <= k p`` on the box and report the tightest ``k``.

    Margins are relative: ``(c h - p)/(c h)`` and ``(k p - c h)/(k p)``.

    Raises
    ------
    SandwichViolation
        If ``p > c h`` beyond round-off at some sample.
    """
    k = float(law.constants.k if k is None else k)
    model = model if model is not None else ThermoModel(law, profile)
    T, X, S, dS = sample_box(box, n, profile)
    pt = model.point_S(T, S, dS, X)
    ch = pt.c * pt.h
    lower = (ch - pt.p) / ch
    upper = (k * pt.p - ch) / (k * pt.p)
    il = np.unravel_index(np.argmin(lower), lower.shape)
    iu = np.unravel_index(np.argmin(upper), upper.shape)
    if lower[il] < -1e-12:
        raise SandwichViolation(f"p > c h at tau={T[il]:.6g}, x={X[il]:.6g} (margin {lower[il]:.3g})")
    return SandwichReport(
        lower_margin=float(lower[il]), upper_margin=float(upper[iu]),
        k_tightest=float(np.max(ch / pt.p)), k_declared=k,
        passed=bool(upper[iu] >= -1e-12),
        witness_lower={"tau": float(T[il]), "x": float(X[il])},
        witness_upper={"tau": float(T[iu]), "x": float(X[iu])},
    )


@dataclass
class BoundConstants:
    """Inputs and the full cascade k3..k13, n_s, n_r of the ``L^inf`` bound."""

    k: float
    k1: float
    k2: float
    k_ml: float
    k_mr: float
    k_s: float
    k_r: float
    V: float
    k3: float
    k4: float
    k5: float
    k6: float
    k7: float
    k8: float
    k9: float
    k10: float
    k11: float
    k12: float
    k13: float
    n_s: float
    n_r: float
    n_s_robust: float
    n_r_robust: float
    segments: int | None = None
    notes: list = field(default_factory=list)

    @property
    def h_max(self):
        return 0.5 * (self.n_s + self.n_r)

    def to_dict(self):
        return asdict(self)


def _n_pair(lead, k9, k10, k11, k12, k13, a, b, V):
    """``lead a + k9 k10 b V + k9 k11 V (k12 a V + k10 k13 b V^2) exp(k11 k13 V^2)``."""
    growth = k9 * k11 * V * (k12 * a * V + k10 * k13 * b * V**2)
    if growth > 0:
        # the Gronwall factor overflows long before the bound becomes useless to report
        growth *= math.exp(k11 * k13 * V**2) if k11 * k13 * V**2 < 709.0 else math.inf
    return lead * a + k9 * k10 * b * V + growth


def bound_constants(k, k1, k2, k_ml, k_mr, k_s, k_r, V, segments=None):
    """Evaluate the constant cascade with ``R = k_mr / k_ml``.

    ``n_s`` uses the displayed leading coefficient ``k6``; ``n_s_robust``
    uses ``max(k4, k6)`` instead. Profiles with more than three monotone
    segments are outside the proved case and carry a note.
    """
    if not k > 1:
        raise ValueError("k must exceed 1")
    for name, v in (("k1", k1), ("k2", k2), ("k_ml", k_ml), ("k_mr", k_mr)):
        if not v > 0:
            raise ValueError(f"{name} must be positive")
    if k_mr < k_ml:
        raise ValueError("k_mr must be at least k_ml")
    if k_s < 0 or k_r < 0 or V < 0:
        raise ValueError("k_s, k_r and V must be non-negative")
    R = k_mr / k_ml
    k3 = max(1 / (2 * k1), 1 / (2 * k * k2))
    k4 = max(R ** (1 / (2 * k * k1)), R ** (1 / (2 * k2)))
    k5 = max(R ** (1 / (2 * k * k1)) / (2 * k * k1), R ** (1 / (2 * k2)) / (2 * k2))
    k6 = max(R ** (1 / (2 * k1)), R ** (1 / (2 * k * k2)))
    k7 = max(1 / (2 * k * k1), 1 / (2 * k2))
    k8 = max(R ** (1 / (2 * k1)) / (2 * k1), R ** (1 / (2 * k * k2)) / (2 * k * k2))
    k9 = k3 * k4 + k5
    k10 = max(1.0, k6)
    k11 = max(k6 * k7 + k8, k7 + k8)
    k12 = max(1.0, k4)
    k13 = max(k3 * k4 + k5, k3 + k5)
    tail = (k9, k10, k11, k12, k13)
    n_s = _n_pair(k6, *tail, k_s, k_r, V)
    n_r = _n_pair(k6, *tail, k_r, k_s, V)
    lead = max(k4, k6)
    notes = []
    if segments is not None and segments > 3:
        notes.append(f"{segments} monotone segments: bound applied beyond the three-region case")
    return BoundConstants(
        k=k, k1=k1, k2=k2, k_ml=k_ml, k_mr=k_mr, k_s=k_s, k_r=k_r, V=V,
        k3=k3, k4=k4, k5=k5, k6=k6, k7=k7, k8=k8, k9=k9, k10=k10, k11=k11, k12=k12, k13=k13,
        n_s=n_s, n_r=n_r, n_s_robust=_n_pair(lead, *tail, k_s, k_r, V),
        n_r_robust=_n_pair(lead, *tail, k_r, k_s, V), segments=segments, notes=notes,
    )


@dataclass
class TauMinBound:
    tau_min: float
    c_max: float
    p_max: float
    h_max: float
    residual: float
    warning: str | None = None

    def to_dict(self):
        return asdict(self)


def _tau_min_single(law, h_max, S, tau_floor):
    def g(logt):
        t = math.exp(logt)
        val = finite_integral(lambda xi: np.sqrt(-law.partials(xi, S).p_tau), t, 1.0, rtol=1e-14)
        return float(val) - h_max

    lo = 0.0
    while g(lo) < 0:
        lo -= 1.0
        if math.exp(lo) < tau_floor:
            return tau_floor, g(math.log(tau_floor)), (
                f"integral of c did not reach h_max above tau_floor={tau_floor:.3g}")
    if lo == 0.0:
        return 1.0, g(0.0), None
    root = optimize.bisect(g, lo, lo + 1.0, xtol=1e-12, rtol=4 * np.finfo(float).eps, maxiter=200)
    return math.exp(root), g(root), None


def tau_min_bound(law, h_max, S_values=(0.0,), tau_floor=1e-12):
    """Lower bound on tau from ``int_{tau_min}^1 c = h_max``.

    With several entropy values the smallest ``tau_min`` is returned and
    ``c_max`` is the largest ``c(tau_min, S)``; ``p_max = c_max h_max``.
    Bisection runs in ``log tau``.
    """
    if not h_max > 0:
        raise ValueError("h_max must be positive")
    best, res, warn = None, 0.0, None
    for S in np.unique(np.asarray(S_values, dtype=float)):
        t, r, w = _tau_min_single(law, float(h_max), float(S), tau_floor)
        if best is None or t < best:
            best, res = t, r
        warn = warn or w
    if warn:
        warnings.warn(warn, RuntimeWarning, stacklevel=2)
    S_arr = np.unique(np.asarray(S_values, dtype=float))
    c_max = float(np.max(np.sqrt(-law.partials(np.full(S_arr.shape, best), S_arr).p_tau)))
    return TauMinBound(best, c_max, c_max * h_max, float(h_max), float(res), warn)


@dataclass
class MonitorCheck:
    name: str
    description: str
    margins: np.ndarray
    worst: float
    first_violation_time: float | None
    location: float | None
    vacuous: bool = False

    @property
    def violated(self):
        return self.first_violation_time is not None

    def summary(self):
        return {
            "description": self.description, "worst_margin": self.worst,
            "violated": self.violated, "first_violation_time": self.first_violation_time,
            "location": self.location, "vacuous": self.vacuous,
        }


@dataclass
class MonitorLog:
    times: np.ndarray
    checks: dict
    slack: float

    @property
    def names(self):
        return list(self.checks)

    @property
    def violations(self):
        return [n for n, c in self.checks.items() if c.violated]

    def to_json_dict(self):
        return {"slack": self.slack, "violations": self.violations,
                "checks": {n: c.summary() for n, c in self.checks.items()}}

    def rows(self):
        """Per-level margins: header and rows for the CSV output."""
        names = self.names
        return ["t"] + names, [[t] + [float(self.checks[n].margins[i]) for n in names]
                               for i, t in enumerate(self.times)]


def monitor_manifest():
    """Names of the monitored inequalities from the shipped manifest."""
    text = resources.files("eulerblow").joinpath("data/monitors_manifest.txt").read_text()
    return [ln.split()[0] for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


def _check(name, desc, margin, times, grid_x, slack, vacuous=False, valid=None):
    """Reduce a (levels, cells) relative-margin array to a MonitorCheck."""
    m = np.asarray(margin, dtype=float)
    if valid is not None:
        m = np.where(valid, m, np.inf)
    per_level = np.min(m, axis=1) if m.ndim == 2 else m
    per_level = np.where(np.isfinite(per_level), per_level, np.inf)
    worst = float(np.min(per_level)) if per_level.size else float("inf")
    bad = np.flatnonzero(per_level < -slack)
    first_t = loc = None
    if bad.size:
        k = int(bad[0])
        first_t = float(times[k])
        if m.ndim == 2:
            loc = float(grid_x[int(np.argmin(m[k]))])
    if vacuous:
        worst = 0.0
    return MonitorCheck(name, desc, per_level, worst if np.isfinite(worst) else 0.0, first_t, loc, vacuous)


def _rel(bound, value):
    bound = np.asarray(bound, dtype=float)
    value = np.asarray(value, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (bound - value) / np.maximum(np.abs(bound), 1e-300)


def monitor_run(trajectory, physics, bounds, tau_bound, threshold_Y, threshold_Q, a2_bound,
                slack=MONITOR_SLACK, upto=None):
    """Re-check every proved bound at every stored level.

    Parameters
    ----------
    bounds : BoundConstants
    tau_bound : TauMinBound
    threshold_Y, threshold_Q : float
        Envelopes Y and Q.
    a2_bound : eulerblow.riccati.A2Bound
    upto : float, optional
        Only levels with ``t <= upto`` are checked (e.g. the blow-up time).

    Returns
    -------
    MonitorLog
        Violations are recorded, never raised.
    """
    law, profile, g = physics.law, physics.profile, physics.grid
    times = trajectory.times
    sel = np.ones(times.size, dtype=bool) if upto is None else times <= upto + 1e-14
    t = times[sel]
    F = {k: v[sel] for k, v in trajectory.fields.items()}
    tau = trajectory.tau[sel]
    x = g.centers
    S = np.broadcast_to(physics.S_cell, tau.shape)
    tm = tau_bound.tau_min
    k = bounds.k
    checks = {}

    def add(name, desc, margin, **kw):
        checks[name] = _check(name, desc, margin, t, x, slack, **kw)

    add("s_bound", "|s| <= n_s", _rel(bounds.n_s, np.abs(F["s"])))
    add("r_bound", "|r| <= n_r", _rel(bounds.n_r, np.abs(F["r"])))
    add("tau_min", "tau >= tau_min", (tau - tm) / tm)
    add("rho_max", "rho <= 1/tau_min", _rel(1.0 / tm, 1.0 / tau))
    add("c_max", "c <= c_max", _rel(tau_bound.c_max, F["c"]))
    add("p_max", "p <= p_max", _rel(tau_bound.p_max, F["p"]))
    ch = F["c"] * F["h"]
    add("pressure_sandwich", "p <= c h <= k p",
        np.minimum((ch - F["p"]) / ch, (k * F["p"] - ch) / (k * F["p"])))
    # Y or Q may vanish (N = 0, sup y0 = 0); scale by the initial gradient size then
    y_scale = max(abs(threshold_Y), float(np.max(np.abs(F["y"][0]))))
    q_scale = max(abs(threshold_Q), float(np.max(np.abs(F["q"][0]))))
    add("y_upper", "y <= Y", (threshold_Y - F["y"]) / max(y_scale, 1e-300))
    add("q_upper", "q <= Q", (threshold_Q - F["q"]) / max(q_scale, 1e-300))
    add("a2_inverse", "1/a2 <= k14 t + k15",
        _rel(a2_bound.bound(t)[:, None], 1.0 / F["a2"]))
    qi = quarter_integral(law, np.full(tau.shape, tm), tau, S)
    add("quarter_integral", "int_{tau_min}^{tau} (-p_xi)^(1/4) <= k16 t + k17",
        _rel(a2_bound.quarter_bound(t)[:, None], qi))

    w = np.broadcast_to(profile.dlogm(x), tau.shape)
    active = np.broadcast_to(physics.dS_cell != 0, tau.shape)
    if np.any(active) and t.size >= 3:
        s = F["s"]
        dsdt = np.empty_like(s)
        dsdt[1:-1] = (s[2:] - s[:-2]) / (t[2:] - t[:-2])[:, None]
        dsdt[0] = (s[1] - s[0]) / (t[1] - t[0])
        dsdt[-1] = (s[-1] - s[-2]) / (t[-1] - t[-2])
        d_plus = dsdt + F["c"] * centered_difference(s, g.dx, g.periodic)
        lo = -F["p"] / bounds.k1 * w
        hi = -F["p"] / bounds.k2 * w
        scale = np.abs(lo) + np.abs(hi) + np.abs(d_plus)
        with np.errstate(divide="ignore", invalid="ignore"):
            margin = np.minimum(d_plus - np.minimum(lo, hi), np.maximum(lo, hi) - d_plus) / scale
        add("entropy_flux", "-p m'/(k1 m) <= d+ s <= -p m'/(k2 m) where S' != 0", margin,
            valid=active & (scale > 0))
    else:
        add("entropy_flux", "-p m'/(k1 m) <= d+ s <= -p m'/(k2 m) where S' != 0",
            np.zeros((t.size, 1)), vacuous=True)
    return MonitorLog(t, checks, slack)
