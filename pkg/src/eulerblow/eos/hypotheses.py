"""Numerical certification of the structural hypotheses (H1)-(H4) on state boxes.

Each checker samples a tensor grid (geometric in tau, uniform in x) and
returns a :class:`HypothesisReport` holding one :class:`ConditionResult`
per condition. Inequalities that admit equality are judged on relative
margins with a ``MARGIN_SLACK`` allowance for round-off.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from ..quadrature import finite_integral
from .profiles import ConstantEntropy

__all__ = [
    "MARGIN_SLACK",
    "StateBox",
    "ConditionResult",
    "HypothesisReport",
    "mu_partials",
    "sample_box",
    "check_h1",
    "check_h2",
    "check_h3",
    "check_h4",
    "check_all",
    "derivative_consistency",
]

MARGIN_SLACK = 1e-12


@dataclass(frozen=True)
class StateBox:
    """Compact box ``[tau_min, tau_max] x [x_min, x_max]`` of states."""

    tau_min: float
    tau_max: float
    x_min: float = 0.0
    x_max: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.tau_min <= self.tau_max):
            raise ValueError(f"invalid tau range [{self.tau_min}, {self.tau_max}]")
        if self.x_max < self.x_min:
            raise ValueError(f"invalid x range [{self.x_min}, {self.x_max}]")


@dataclass
class ConditionResult:
    id: str
    description: str
    status: str
    passed: bool
    margin: float
    witness: dict = field(default_factory=dict)
    best_constant: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)


@dataclass
class HypothesisReport:
    hypothesis: str
    box: StateBox | None
    conditions: list

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def __getitem__(self, cid):
        for c in self.conditions:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_dict(self):
        return {
            "hypothesis": self.hypothesis,
            "passed": self.passed,
            "box": asdict(self.box) if self.box is not None else None,
            "conditions": [_clean(asdict(c)) for c in self.conditions],
        }


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else (None if np.isnan(v) else ("inf" if v > 0 else "-inf"))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def sample_box(box, n, profile=None):
    """Tensor grid over the box: geometric in tau, uniform in x.

    Returns ``(tau, x, S, dS)`` arrays of shape ``(n_tau, n_x)``.
    """
    if n < 2:
        raise ValueError("need at least 2 samples per axis")
    profile = profile if profile is not None else ConstantEntropy()
    tau = np.geomspace(box.tau_min, box.tau_max, n)
    x = np.linspace(box.x_min, box.x_max, n) if box.x_max > box.x_min else np.array([box.x_min])
    T, X = np.meshgrid(tau, x, indexing="ij")
    S = np.broadcast_to(profile.S(X), T.shape)
    dS = np.broadcast_to(profile.dS(X), T.shape)
    return T, X, S, dS


def mu_partials(partials, dS):
    """Assemble derivatives along the entropy direction.

    ``p_mu = p_S S'``, ``p_taumu = p_tauS S'``, ``p_tautaumu = p_tautauS S'`` and
    ``p_mumu = p_SS S'^2``. No S'' term enters ``p_mumu``.
    """
    dS = np.asarray(dS, dtype=float)
    return {
        "p_mu": partials.p_S * dS,
        "p_taumu": partials.p_tauS * dS,
        "p_tautaumu": partials.p_tautauS * dS,
        "p_mumu": partials.p_SS * dS**2,
    }


def _witness(T, X, idx):
    return {"tau": float(T[idx]), "x": float(X[idx])}


def _relative(num, *terms):
    scale = sum(np.abs(t) for t in terms)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(scale > 0, num / scale, 0.0)


def _on_tau_edge(T, idx, box):
    t = T[idx]
    return np.isclose(t, box.tau_min, rtol=1e-12) or np.isclose(t, box.tau_max, rtol=1e-12)


def _sign_result(cid, desc, values, T, X):
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    if not np.all(finite):
        idx = np.unravel_index(np.argmin(finite), values.shape)
        return ConditionResult(cid, desc, "fail", False, float("nan"), _witness(T, X, idx),
                               notes=["law evaluation produced a non-finite value"])
    idx = np.unravel_index(np.argmin(values), values.shape)
    worst = float(values[idx])
    ok = worst > 0.0
    return ConditionResult(cid, desc, "pass" if ok else "fail", ok, worst, _witness(T, X, idx))


def _limit_zero_at_zero_divergence(law, tau0, S, halvings=40):
    """Classify p -> +inf as tau -> 0 from a halving sequence."""
    tau = tau0 * 2.0 ** -np.arange(halvings + 1)
    p = np.asarray(law.partials(tau, S).p, dtype=float)
    inc = np.diff(p)
    if not np.all(np.isfinite(p)) or np.any(inc <= 0):
        return False, "p is not increasing as tau -> 0"
    ratio = inc[1:] / inc[:-1]
    r = float(np.median(ratio[-8:]))
    if r >= 1.0 - 1e-6:
        return True, f"increments grow by factor {r:.4g} per halving (unbounded)"
    return False, f"increments shrink by factor {r:.4g} per halving; p tends to a finite limit"


def _limit_infinity(law, tau0, S, doublings=60):
    """Classify p -> 0 as tau -> inf; returns (ok, extrapolated limit, note)."""
    tau = tau0 * 2.0 ** np.arange(doublings + 1)
    p = np.asarray(law.partials(tau, S).p, dtype=float)
    p_ref = abs(float(p[0])) if p[0] != 0 else 1.0
    if not np.all(np.isfinite(p)):
        return False, float("nan"), "non-finite pressure at large tau"
    inc = np.diff(p)
    if np.any(p < -1e-12 * p_ref):
        return False, float(p[-1]), "pressure becomes negative at large tau"
    last = inc[-8:]
    with np.errstate(divide="ignore", invalid="ignore"):
        r = float(np.median(last[1:] / last[:-1])) if np.all(last[:-1] != 0) else 0.0
    if 0.0 <= r < 1.0:
        limit = float(p[-1] + inc[-1] * r / (1.0 - r))
    else:
        limit = float(p[-1])
    ok = abs(limit) <= 1e-6 * p_ref
    return ok, limit, f"extrapolated limit {limit:.3g}"


def check_h1(law, box, n=64, profile=None):
    """Sign conditions p_tau < 0, p_tautau > 0 and the two pressure limits."""
    T, X, S, dS = sample_box(box, n, profile)
    try:
        P = law.partials(T, S)
    except Exception as exc:  # noqa: BLE001
        raise ValueError(f"pressure law failed on box {box}: {exc}") from exc
    conds = [
        _sign_result("H1.1", "p_tau < 0", -np.asarray(P.p_tau), T, X),
        _sign_result("H1.2", "p_tautau > 0", np.asarray(P.p_tautau), T, X),
    ]
    S_edge = np.unique(np.asarray(S)[0])
    ok_all, notes = True, []
    for s in S_edge[:: max(1, len(S_edge) // 8)]:
        ok, note = _limit_zero_at_zero_divergence(law, box.tau_min, s)
        ok_all &= ok
        notes.append(f"S={s:.4g}: {note}")
    conds.append(ConditionResult("H1.3", "p -> +inf as tau -> 0", "pass (indicative only)" if ok_all
                                 else "fail (indicative only)", ok_all, float("nan"),
                                 {"tau": box.tau_min}, notes=notes))
    ok_all, notes, worst = True, [], 0.0
    for s in S_edge[:: max(1, len(S_edge) // 8)]:
        ok, limit, note = _limit_infinity(law, box.tau_max, s)
        ok_all &= ok
        worst = max(worst, abs(limit)) if np.isfinite(limit) else float("nan")
        notes.append(f"S={s:.4g}: {note}")
    conds.append(ConditionResult("H1.4", "p -> 0 as tau -> inf", "pass (indicative only)" if ok_all
                                 else "fail (indicative only)", ok_all, -worst,
                                 {"tau": box.tau_max}, notes=notes))
    return HypothesisReport("H1", box, conds)


def _growth_classification(increments, toward_zero):
    """Fit a power-law exponent to integrand samples from dyadic increments.

    For an integrand ~ xi**(-beta) the dyadic increments scale by
    ``2**(beta - 1)`` per halving (toward zero) or ``2**(1 - beta)`` per
    doubling (toward infinity).
    """
    inc = np.asarray(increments, dtype=float)
    if not np.all(np.isfinite(inc)) or np.any(inc < 0):
        return "inconclusive", float("nan")
    tail = inc[-10:]
    if np.any(tail == 0):
        return "convergent", float("inf")
    slope = float(np.mean(np.log2(tail[1:] / tail[:-1])))
    beta = 1.0 + slope if toward_zero else 1.0 - slope
    if toward_zero:
        return ("divergent" if beta >= 1.0 - 1e-3 else "convergent"), beta
    return ("convergent" if beta > 1.0 + 1e-3 else "divergent"), beta


def check_h2(law, x=0.0, profile=None, levels=48):
    """Sound-speed condition: divergence near tau = 0, convergence at infinity."""
    profile = profile if profile is not None else ConstantEntropy()
    S = float(np.asarray(profile.S(np.array(x))))

    def speed(xi):
        with np.errstate(invalid="ignore"):
            return np.sqrt(-np.asarray(law.partials(xi, S).p_tau, dtype=float))

    k = np.arange(levels)
    near = finite_integral(speed, 2.0 ** -(k + 1), 2.0**-k)
    far = finite_integral(speed, 2.0**k, 2.0 ** (k + 1))
    near_cls, near_beta = _growth_classification(near, True)
    far_cls, far_beta = _growth_classification(far, False)
    partial_near = np.cumsum(near)
    partial_far = np.cumsum(far)
    conds = [
        ConditionResult(
            "H2.1", "integral of sqrt(-p_tau) over (0, 1) diverges",
            "inconclusive" if near_cls == "inconclusive" else ("pass" if near_cls == "divergent" else "fail"),
            near_cls == "divergent", float(near_beta - 1.0), {"x": float(x), "S": S},
            {"exponent": near_beta},
            notes=[f"{near_cls}; partial sum at eps=2^-{levels}: {partial_near[-1]:.6g}"],
        ),
        ConditionResult(
            "H2.2", "integral of sqrt(-p_tau) over (1, inf) converges",
            "inconclusive" if far_cls == "inconclusive" else ("pass" if far_cls == "convergent" else "fail"),
            far_cls == "convergent", float(far_beta - 1.0), {"x": float(x), "S": S},
            {"exponent": far_beta},
            notes=[f"{far_cls}; partial sum at T=2^{levels}: {partial_far[-1]:.6g}"],
        ),
    ]
    report = HypothesisReport("H2", None, conds)
    report.partial_sums = {"near": partial_near, "far": partial_far}
    return report


def _upper_result(cid, desc, lhs, rhs, T, X, best, box=None, edge_note=None):
    """Result for ``lhs <= rhs`` judged on relative margins."""
    margin = _relative(rhs - lhs, lhs, rhs)
    idx = np.unravel_index(np.argmin(margin), margin.shape)
    worst = float(margin[idx])
    ok = bool(worst >= -MARGIN_SLACK)
    notes = []
    if edge_note is not None:
        notes.append(edge_note)
    return ConditionResult(cid, desc, "pass" if ok else "fail", ok, worst, _witness(T, X, idx), best, notes)


def check_h3(law, box, n=64, profile=None, constants=None):
    """Nonlinearity conditions on p_tautau and p_tau3 with the declared constants."""
    const = constants if constants is not None else law.constants
    T, X, S, dS = sample_box(box, n, profile)
    P = law.partials(T, S)
    c = np.sqrt(-P.p_tau)
    c72 = c**3.5
    pp = P.p * P.p_tautau

    lower_ratio = P.p_tautau / c72
    i_lo = np.unravel_index(np.argmin(lower_ratio), lower_ratio.shape)
    upper_ratio = pp / c72
    i_hi = np.unravel_index(np.argmax(upper_ratio), upper_ratio.shape)

    def edge(idx, what):
        if _on_tau_edge(T, idx, box):
            return (f"{what} attained on the tau-edge of the box; no uniform constant "
                    "on (0, inf) is indicated (box-local certification only)")
        return None

    conds = [
        _upper_result("H3.1", "l2 p c^(7/2) <= p p_tautau", const.l2 * P.p * c72, pp, T, X,
                      {"l2": float(lower_ratio[i_lo])}, box, edge(i_lo, "inf of p_tautau/c^(7/2)")),
        _upper_result("H3.2", "p p_tautau <= l1 c^(7/2)", pp, const.l1 * c72, T, X,
                      {"l1": float(upper_ratio[i_hi])}, box, edge(i_hi, "sup of p p_tautau/c^(7/2)")),
    ]

    X2 = P.p_tau**2
    denom = 2.0 * X2 - pp
    if np.any(denom <= 0):
        idx = np.unravel_index(np.argmin(denom), denom.shape)
        conds.append(ConditionResult("H3.3", "2(k-1)(-p_tau)^2 >= k p p_tautau", "fail", False,
                                     float(_relative(denom, 2 * X2, pp)[idx]), _witness(T, X, idx),
                                     {"k": float("inf")}, ["no finite k exists on this box"]))
    else:
        k_ratio = 2.0 * X2 / denom
        conds.append(_upper_result("H3.3", "2(k-1)(-p_tau)^2 >= k p p_tautau",
                                   const.k * pp, 2.0 * (const.k - 1.0) * X2, T, X,
                                   {"k": float(np.max(k_ratio)),
                                    "k_spread": float(np.max(k_ratio) - np.min(k_ratio))}))

    A_ratio = 4.0 * P.p_tau * P.p_tau3 / P.p_tautau**2 - 5.0
    conds.append(_upper_result("H3.4", "(5+A) p_tautau^2 - 4 p_tau p_tau3 >= 0",
                               4.0 * P.p_tau * P.p_tau3, (5.0 + const.A) * P.p_tautau**2, T, X,
                               {"A": float(np.max(A_ratio))}))
    return HypothesisReport("H3", box, conds)


def _feasible_interval(rho, wB):
    """Admissible range for a positive constant C in the written sandwich forms.

    Returns ((lower-constant interval), (upper-constant interval)) for
    ``wB/L <= Z <= wB/U`` with ``rho = Z / wB``.
    """
    pos = wB > 0
    neg = wB < 0
    inf = float("inf")
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = 1.0 / rho
    L_lo = float(np.max(inv[pos])) if np.any(pos) else 0.0
    L_hi = float(np.min(inv[neg])) if np.any(neg) else inf
    U_lo = float(np.max(inv[neg])) if np.any(neg) else 0.0
    U_hi = float(np.min(inv[pos])) if np.any(pos) else inf
    if np.any(pos & (rho <= 0)):
        L_lo, U_hi = inf, -inf
    if np.any(neg & (rho <= 0)):
        L_hi, U_lo = -inf, inf
    return (L_lo, L_hi), (U_lo, U_hi)


def check_h4(law, profile, box, n=64, constants=None):
    """Entropy sandwich conditions, as written, with the declared constants.

    Where ``m' < 0`` the written orientation is still applied; violations
    carry the segment sign and an orientation-free (ordered) margin is
    reported alongside.
    """
    const = constants if constants is not None else law.constants
    T, X, S, dS = sample_box(box, n, profile)
    w = np.broadcast_to(profile.dlogm(X), T.shape)
    P = law.partials(T, S)
    mu = mu_partials(P, dS)
    specs = [
        ("H4.1", "m'/(k2 m) p <= p_mu <= m'/(k1 m) p", mu["p_mu"], P.p, const.k2, const.k1, ("k2", "k1")),
        ("H4.2", "m'/(l4 m) p_tau <= p_taumu <= m'/(l3 m) p_tau", mu["p_taumu"], P.p_tau,
         const.l4, const.l3, ("l4", "l3")),
        ("H4.3", "m'/(l6 m) p <= p_mumu <= m'/(l5 m) p", mu["p_mumu"], P.p, const.l6, const.l5, ("l6", "l5")),
        ("H4.4", "m'/(l8 m) p_tautau <= p_tautaumu <= m'/(l7 m) p_tautau", mu["p_tautaumu"], P.p_tautau,
         const.l8, const.l7, ("l8", "l7")),
    ]
    conds = []
    if np.all(np.asarray(dS) == 0) or np.all(w == 0):
        for cid, desc, *_ in specs:
            conds.append(ConditionResult(cid, desc, "vacuous pass", True, 0.0,
                                         notes=["S' vanishes on the box; both bounds are zero"]))
        return HypothesisReport("H4", box, conds)

    for cid, desc, Z, B, L, U, names in specs:
        wB = w * B
        lower = wB / L
        upper = wB / U
        m_lo = _relative(Z - lower, Z, lower, upper)
        m_hi = _relative(upper - Z, Z, lower, upper)
        written = np.minimum(m_lo, m_hi)
        ordered = np.minimum(_relative(Z - np.minimum(lower, upper), Z, lower, upper),
                             _relative(np.maximum(lower, upper) - Z, Z, lower, upper))
        idx = np.unravel_index(np.argmin(written), written.shape)
        worst = float(written[idx])
        ok = bool(worst >= -MARGIN_SLACK)
        notes = []
        if not ok:
            seg_sign = int(np.sign(w[idx]))
            notes.append(f"violation on a segment with sign(m') = {seg_sign:+d}")
        if np.any(w < 0):
            notes.append(f"segments with m' < 0 present; ordered-sandwich margin {float(np.min(ordered)):.3g}")
        with np.errstate(divide="ignore", invalid="ignore"):
            rho = np.where(wB != 0, Z / wB, np.nan)
        mask = np.isfinite(rho)
        best = {}
        if np.any(mask):
            (L_lo, L_hi), (U_lo, U_hi) = _feasible_interval(rho[mask], wB[mask])
            best = {f"{names[0]}_range": [L_lo, L_hi], f"{names[1]}_range": [U_lo, U_hi]}
        conds.append(ConditionResult(cid, desc, "pass" if ok else "fail", ok, worst,
                                     _witness(T, X, idx), best, notes))
        conds[-1].ordered_margin = float(np.min(ordered))
    return HypothesisReport("H4", box, conds)


def check_all(law, profile, box, n=64, constants=None):
    """Run all four checkers; H2 is evaluated at the box's x-midpoint."""
    x_mid = 0.5 * (box.x_min + box.x_max)
    return [
        check_h1(law, box, n, profile),
        check_h2(law, x_mid, profile),
        check_h3(law, box, n, profile, constants),
        check_h4(law, profile, box, n, constants),
    ]


_FD_PAIRS = [
    ("p_tau", "p", "tau"),
    ("p_tautau", "p_tau", "tau"),
    ("p_tau3", "p_tautau", "tau"),
    ("p_S", "p", "S"),
    ("p_tauS", "p_tau", "S"),
    ("p_SS", "p_S", "S"),
    ("p_tautauS", "p_tautau", "S"),
]


def derivative_consistency(law, box, n=8, profile=None, rel_step=1e-3):
    """Worst relative error of declared partials against centered differences.

    Each partial is compared with a Richardson-extrapolated centered
    difference of its parent quantity. Samples are interior to the box.

    Returns
    -------
    worst : float
    per_partial : dict
    """
    T, X, S, dS = sample_box(box, n + 2, profile)
    T, S = T[1:-1, :], np.asarray(S)[1:-1, :]
    if T.shape[1] > 2:
        T, S = T[:, 1:-1], S[:, 1:-1]
    base = law.partials(T, S)
    per = {}
    for name, parent, var in _FD_PAIRS:
        if var == "tau":
            h = rel_step * T

            def f(shift, parent=parent):
                return getattr(law.partials(T + shift, S), parent)
            char = T
        else:
            h = rel_step * np.maximum(1.0, np.abs(S))

            def f(shift, parent=parent):
                return getattr(law.partials(T, S + shift), parent)
            char = np.ones_like(T)
        d1 = (f(h) - f(-h)) / (2 * h)
        d2 = (f(h / 2) - f(-h / 2)) / h
        fd = (4.0 * d2 - d1) / 3.0
        declared = np.asarray(getattr(base, name), dtype=float)
        parent_val = np.abs(np.asarray(getattr(base, parent), dtype=float))
        denom = np.abs(declared) + 1e-10 * parent_val / char
        with np.errstate(divide="ignore", invalid="ignore"):
            err = np.where(denom > 0, np.abs(fd - declared) / denom, 0.0)
        per[name] = float(np.max(err))
    return max(per.values()), per
