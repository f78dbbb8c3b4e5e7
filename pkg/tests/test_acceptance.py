"""Acceptance criteria, each at its stated tolerance and runtime.

Every test records one PASS/FAIL line, printed again in the terminal summary.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from eulerblow import verify
from eulerblow.eos import ConstantEntropy, GammaLaw, StateBox, check_all
from eulerblow.eos.hypotheses import check_h3
from eulerblow.eos.laws import ExpressionLaw
from eulerblow.riccati import a2_chain_rule, a2_closed, estimate_N
from eulerblow.solver import Grid, Physics, Trajectory, initial_data, run, trace_characteristic
from eulerblow.thermo import ThermoModel, compute_h

sys.path.insert(0, str(Path(__file__).resolve().parent))
from test_verify import cascade_reference  # noqa: E402

GAMMAS = (1.4, 2.0, 3.0)


def _rel(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def test_criterion_1_gamma_law_closed_forms(acceptance):
    t0 = time.perf_counter()
    tau = np.geomspace(0.1, 10.0, 41)
    worst = {"c": 0.0, "h": 0.0, "a2": 0.0, "k": 0.0}
    for g in GAMMAS:
        law = GammaLaw(1.0, g)
        sym = ExpressionLaw(f"tau**(-{g})")
        c_exact = np.sqrt(g) * tau ** (-(g + 1) / 2)
        h_exact = 2 * np.sqrt(g) / (g - 1) * tau ** (-(g - 1) / 2)
        worst["c"] = max(worst["c"], _rel(np.sqrt(-sym.partials(tau, 0.0).p_tau), c_exact))
        worst["h"] = max(worst["h"], _rel(compute_h(law, tau, method="quadrature"), h_exact))
        P = law.partials(tau, 0.0)
        a2_exact = 0.25 * (-P.p_tau) ** -1.25 * P.p_tautau
        worst["a2"] = max(worst["a2"], _rel(a2_closed(P.p_tau, P.p_tautau), a2_exact),
                          _rel(a2_chain_rule(law, tau), a2_exact))
        k_best = 2 * g / (g - 1)
        rep = verify.check_pressure_sandwich(law, ConstantEntropy(), StateBox(0.1, 10.0, -1, 1),
                                             n=24, k=k_best)
        worst["k"] = max(worst["k"], abs(rep.k_tightest / k_best - 1))
    elapsed = time.perf_counter() - t0
    ok = worst["c"] < 1e-8 and worst["h"] < 1e-8 and worst["a2"] < 1e-8 and worst["k"] < 1e-6 and elapsed < 10
    detail = ", ".join(f"{k} rel {v:.2e}" for k, v in worst.items()) + f", {elapsed:.2f} s"
    assert acceptance(1, "gamma-law closed-form suite", ok, detail)


def _riccati_traj():
    g = Grid(-10.0, 10.0, 64, "periodic")
    shape = (3, 64)
    f = {"c": np.ones(shape), "a0": np.zeros(shape), "a1": np.zeros(shape),
         "a2": np.full(shape, 0.5), "y": np.full(shape, -2.0), "q": np.full(shape, -2.0)}
    return Trajectory(g, np.linspace(0.0, 3.0, 3), np.ones(shape), np.zeros(shape), f)


def test_criterion_2_riccati_exact_blowup(acceptance):
    traj = _riccati_traj()
    override = {"a0": 0.0, "a1": 0.0, "a2": 0.5}
    t0 = time.perf_counter()
    T = trace_characteristic(traj, 0.0, "forward", dt=1e-3, coefficient_override=override).t_blowup
    elapsed = time.perf_counter() - t0
    dts = np.array([0.05, 0.025, 0.0125, 0.00625])
    errs = np.array([abs(trace_characteristic(traj, 0.0, "forward", dt=dt, coefficient_override=override)
                         .t_blowup - 1.0) for dt in dts])
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    ok = abs(T - 1.0) < 0.01 and abs(order - 4.0) < 0.75 and elapsed < 1.0
    assert acceptance(2, "Riccati exact blow-up", ok,
                      f"T={T:.12g} at dt=1e-3, fitted order {order:.2f} (RK4), {elapsed:.3f} s")


def test_criterion_3_isentropic_degeneration(acceptance):
    law = ExpressionLaw("tau**-2 + 0.3 * tau**-1.5")  # no closed forms: exercises the lattice
    model = ThermoModel(law, ConstantEntropy(), tau_range=(0.2, 5.0), tau_points=65)
    tau = np.geomspace(0.2, 5.0, 65)
    pt = model.point(tau, np.zeros_like(tau))
    from eulerblow.riccati import coefficients_from_point
    rc = coefficients_from_point(pt)
    worst = max(float(np.max(np.abs(v))) for v in (pt.I, pt.I_mu, rc.a0, rc.a1))
    est = estimate_N(law, ConstantEntropy(), StateBox(0.2, 5.0, -1.0, 1.0), n=32, model=model)
    ok = worst < 1e-12 and est.N_raw == 0.0
    assert acceptance(3, "isentropic degeneration", ok,
                      f"max |I, I_mu, a0, a1| = {worst:.1e}, N_raw = {est.N_raw}")


def test_criterion_4_blowup_detection(acceptance, reference_cfg, entropy_cfg):
    from eulerblow import pipeline
    lines, ok = [], True
    for name, cfg in (("isentropic", reference_cfg), ("entropy", entropy_cfg)):
        t0 = time.perf_counter()
        res = pipeline.simulate(cfg)
        elapsed = time.perf_counter() - t0
        r = res.report
        good = (cfg.grid["cells"] == 1024 and r.criterion and r.status == "blew-up"
                and r.detected_T <= 1.05 * r.predicted_T_bound and elapsed < 60)
        ok &= bool(good)
        lines.append(f"{name}: N={r.N:.3g}, inf y0={r.inf_y0:.3g}, T={r.detected_T:.4g} "
                     f"<= 1.05*{r.predicted_T_bound:.4g}, {elapsed:.1f} s")
    assert acceptance(4, "blow-up detection vs analytic bound", ok, "; ".join(lines))


CRITERION_5_MONITORS = ("tau_min", "rho_max", "c_max", "s_bound", "r_bound", "y_upper", "q_upper",
                        "a2_inverse", "quarter_integral")


def test_criterion_5_proved_bound_monitors(acceptance, reference_run):
    mon = reference_run.monitors
    missing = [n for n in CRITERION_5_MONITORS if n not in mon.checks]
    bad = [n for n in CRITERION_5_MONITORS if n in mon.checks and mon.checks[n].violated]
    ok = not missing and not bad and mon.slack == 1e-3
    detail = (f"{len(CRITERION_5_MONITORS)} monitors at slack {mon.slack:g} up to t="
              f"{reference_run.trajectory.times[-1]:.4g}; violated: {bad or 'none'}")
    assert acceptance(5, "proved-bound monitors", ok, detail)


def test_criterion_6_cross_validation_window(acceptance, reference_run):
    traj = reference_run.trajectory
    trigger = traj.blowup["trigger"]
    direction = "backward" if trigger.endswith("backward") else "forward"
    seed = next(s for s in traj.info["seeds"] if s["direction"] == direction)
    path = trace_characteristic(traj, seed["x"], direction)
    t_end, worst, reached = path.agreement_window(0.05, 10.0)
    ok = reached and worst <= 0.05
    assert acceptance(6, "cross-validation window", ok,
                      f"{direction} from x={seed['x']:.4g}: worst rel {worst:.4f} up to t={t_end:.4g}, "
                      f"10x growth reached={reached}")


def test_criterion_7_conservation_and_symmetry(acceptance):
    law = GammaLaw(1.0, 2.0)
    g = Grid(-1.0, 1.0, 200, "periodic")
    x = g.centers
    traj = run(Physics(law, ConstantEntropy(), g), 1.0 + 0.2 * np.sin(2 * np.pi * x),
               0.1 * np.cos(np.pi * x), 0.4, riccati_trigger=False)
    T = traj.times[-1]
    drift = max(float(np.max(np.abs(q.sum(axis=1) - q[0].sum()) / np.abs(q[0]).sum())) / T
                for q in (traj.tau, traj.u))
    gm = Grid(-4.0, 4.0, 256, "outflow")
    tau, u = initial_data("riemann-smooth", {"left": {"u": 0.4}, "right": {"u": -0.4},
                                             "transition_width": 1.0}, gm)
    tm = run(Physics(law, ConstantEntropy(), gm), tau, u, 0.8, riccati_trigger=False)
    asym = max(float(np.max(np.abs(tm.tau[-1] - tm.tau[-1][::-1]))),
               float(np.max(np.abs(tm.u[-1] + tm.u[-1][::-1]))))
    ok = drift < 1e-10 and asym < 1e-12
    assert acceptance(7, "conservation and symmetry", ok,
                      f"relative drift per unit time {drift:.1e}, mirror defect {asym:.1e}")


BOX_SUITE = [StateBox(0.1, 10.0, -1.0, 1.0), StateBox(0.5, 2.0, -3.0, 3.0), StateBox(0.2, 0.9, 0.0, 1.0)]


def test_criterion_8_hypothesis_checker_constants(acceptance):
    spread, flips, checked = 0.0, [], 0
    for g in GAMMAS:
        law = GammaLaw(1.0, g)
        k_best = 2 * g / (g - 1)
        for box in BOX_SUITE:
            best = check_h3(law, box)["H3.3"].best_constant
            spread = max(spread, abs(best["k"] - k_best), best["k_spread"])
            coarse = check_all(law, ConstantEntropy(), box, 16)
            fine = check_all(law, ConstantEntropy(), box, 64)
            for rc, rf in zip(coarse, fine):
                for cc, cf in zip(rc.conditions, rf.conditions):
                    checked += 1
                    if cc.passed != cf.passed:
                        flips.append(f"g={g} {cc.id}")
    ok = spread < 1e-10 and not flips
    assert acceptance(8, "hypothesis-checker constants", ok,
                      f"max k deviation/spread {spread:.1e}; {checked} verdicts, flips: {flips or 'none'}")


def test_criterion_9_constant_cascade(acceptance):
    rng = np.random.default_rng(9)
    identity_ok, worst = True, 0.0
    for _ in range(200):
        k, k1, k2 = rng.uniform(1.1, 20), rng.uniform(0.05, 2), rng.uniform(0.05, 2)
        km, ks, kr = rng.uniform(0.1, 3), rng.uniform(0, 10), rng.uniform(0, 10)
        b = verify.bound_constants(k, k1, k2, km, km, ks, kr, 0.0)
        identity_ok &= b.n_s == ks and b.n_r == kr
        kmr, V = km * rng.uniform(1, 5), rng.uniform(0, 1.5)
        b = verify.bound_constants(k, k1, k2, km, kmr, ks, kr, V)
        for name, val in cascade_reference(k, k1, k2, km, kmr, ks, kr, V).items():
            got = getattr(b, name)
            if math.isinf(val) or val == 0:
                worst = max(worst, 0.0 if got == val else math.inf)
            else:
                worst = max(worst, abs(got / val - 1))
    ok = identity_ok and worst < 1e-12
    assert acceptance(9, "constant cascade", ok,
                      f"V=0 identity exact: {identity_ok}; worst rel vs re-evaluation {worst:.1e}")
