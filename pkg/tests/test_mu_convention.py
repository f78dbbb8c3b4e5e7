"""Entropy-direction derivative conventions and the exactness of the y/q decomposition.

The symbolic model works in (h, x): for the gamma = 2 law with c_v = 1,
tau(h, S) is explicit, x-derivatives are taken at fixed h, and ``Dx`` and
``Dt`` apply the chain rule through the evolving fields (h, u_x, h_x).
"""

import random
from pathlib import Path

import numpy as np
import pytest
import sympy as sp

from eulerblow.eos import profile_from_config
from eulerblow.eos.laws import ExpressionLaw, GammaLaw
from eulerblow.thermo import ThermoModel, compute_h_S, fixed_h_parts

x = sp.symbols("x", real=True)
H, ux, hx, uxx, hxx = sp.symbols("H u_x h_x u_xx h_xx")
S = sp.Function("S")(x)
CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"
TANH = sp.Lambda(x, sp.Rational(1, 2) * sp.tanh(x))


def _model(fixed_tau_pmu):
    tau_of = (H / (2 * sp.sqrt(2 * sp.exp(S)))) ** -2
    p = sp.exp(S) * tau_of**-2
    c = sp.simplify(sp.diff(p, H))
    if fixed_tau_pmu:
        t = sp.Symbol("t", positive=True)
        pmu = (sp.diff(sp.exp(S) * t**-2, x)).subs(t, tau_of)
    else:
        pmu = sp.diff(p, x)
    sc = sp.sqrt(c)
    hs = sp.Symbol("hs", positive=True)
    integrand = sp.simplify((sc / 2 * sp.diff(pmu / c, H)).subs(H, hs))
    I = sp.simplify(sp.integrate(integrand, (hs, 0, H)))
    return p, c, pmu, I


def _residuals(fixed_tau_pmu):
    p, c, pmu, I = _model(fixed_tau_pmu)
    sc = sp.sqrt(c)

    def Dx(f):
        return sp.diff(f, x) + sp.diff(f, H) * hx + sp.diff(f, ux) * uxx + sp.diff(f, hx) * hxx

    ht, ut = -c * ux, -Dx(p)
    uxt, hxt = Dx(ut), Dx(ht)

    def Dt(f):
        return sp.diff(f, H) * ht + sp.diff(f, ux) * uxt + sp.diff(f, hx) * hxt

    y = sc * (ux + hx) + pmu / sc - I
    q = sc * (ux - hx) - pmu / sc + I
    a2 = sp.diff(c, H) / (2 * sc)
    a1 = -sp.diff(2 * sc * I, H)
    k = sp.diff(pmu / c, H)
    a0 = -c * sp.diff(I, x) + sc / 2 * k * pmu - c * k * I - a2 * I**2
    ry = Dt(y) + c * Dx(y) - (a0 + a1 * y - a2 * y**2)
    rq = Dt(q) - c * Dx(q) - (a0 - a1 * q - a2 * q**2)
    return [r.subs(S, TANH(x)).doit() for r in (ry, rq)]


def _sample(expr, n=6, seed=3):
    rng = random.Random(seed)
    vals = []
    for _ in range(n):
        sub = {H: rng.uniform(0.5, 3), x: rng.uniform(-2, 2), hx: rng.uniform(-1, 1),
               ux: rng.uniform(-1, 1), uxx: rng.uniform(-1, 1), hxx: rng.uniform(-1, 1)}
        vals.append(abs(float(expr.subs(sub).evalf(30))))
    return max(vals)


def test_decomposition_exact_at_fixed_h():
    for r in _residuals(fixed_tau_pmu=False):
        assert _sample(r) < 1e-12


def test_decomposition_not_exact_at_fixed_tau():
    ry, rq = _residuals(fixed_tau_pmu=True)
    assert _sample(ry) > 1e-3 and _sample(rq) > 1e-3


def test_package_fixed_h_matches_symbolic_model():
    p, c, pmu, I = _model(fixed_tau_pmu=False)
    sub = lambda e: sp.lambdify((H, x), e.subs(S, TANH(x)).doit(), "mpmath")
    I_f, Imu_f, pmu_f = sub(I), sub(sp.diff(I, x)), sub(pmu)
    model = ThermoModel(GammaLaw(K=1.0, gamma=2.0),
                        profile_from_config("tanh", {"amplitude": 0.5, "width": 1.0}),
                        mu_convention="fixed-h")
    for tau, xv in ((0.5, 0.0), (1.3, -0.7), (2.0, 1.5)):
        pt = model.point(np.array([tau]), np.array([xv]))
        hv = float(pt.h[0])
        assert float(pt.I[0]) == pytest.approx(float(I_f(hv, xv)), rel=1e-12)
        assert float(pt.I_mu[0]) == pytest.approx(float(Imu_f(hv, xv)), rel=1e-12)
        assert float(pt.p_mu[0]) == pytest.approx(float(pmu_f(hv, xv)), rel=1e-12)


def test_gamma_two_fixed_h_flips_sign_of_fixed_tau():
    prof = profile_from_config("tanh", {"amplitude": 0.5, "width": 1.0})
    law = GammaLaw(K=1.0, gamma=2.0)
    T, X = np.array([0.4, 1.0, 2.5]), np.array([-1.0, 0.3, 1.2])
    a = ThermoModel(law, prof).point(T, X)
    b = ThermoModel(law, prof, mu_convention="fixed-h").point(T, X)
    np.testing.assert_allclose(b.p_mu, -a.p_mu, rtol=1e-14)
    np.testing.assert_allclose(b.I, -a.I, rtol=1e-13)


@pytest.mark.parametrize("g", [1.4, 2.0, 3.0])
def test_fixed_h_closed_form_matches_quadrature(g):
    tau, Sv = np.array([0.3, 1.0, 4.0]), np.array([-0.4, 0.0, 0.7])
    closed = GammaLaw(K=1.0, gamma=g).fixed_h_closed(tau, Sv)
    quad = fixed_h_parts(ExpressionLaw(f"exp(S) * tau**(-{g})"), tau, Sv)
    np.testing.assert_allclose(quad[0], closed[0], rtol=1e-12)
    np.testing.assert_allclose(quad[1], closed[1], rtol=1e-12)
    np.testing.assert_allclose(quad[2], closed[2], rtol=1e-8)  # S-difference in K


def test_h_S_is_half_h_for_gamma_law():
    law = GammaLaw(K=1.0, gamma=1.4)
    tau = np.array([0.5, 2.0])
    np.testing.assert_allclose(compute_h_S(ExpressionLaw("exp(S) * tau**(-1.4)"), tau, 0.0),
                               0.5 * law.h_closed(tau, 0.0), rtol=1e-12)


def test_fixed_h_lattice_matches_closed_form():
    prof = profile_from_config("tanh", {"amplitude": 0.5, "width": 1.0})
    T, X = np.array([0.3, 1.1, 3.0]), np.array([-1.0, 0.2, 1.5])
    a = ThermoModel(GammaLaw(K=1.0, gamma=2.0), prof, mu_convention="fixed-h").point(T, X)
    b = ThermoModel(ExpressionLaw("exp(S) * tau**(-2)"), prof, tau_range=(0.2, 5.0),
                    S_range=(-0.5, 0.5), mu_convention="fixed-h").point(T, X)
    for name in ("h", "I", "I_mu", "p_mu", "p_taumu"):
        np.testing.assert_allclose(getattr(b, name), getattr(a, name), rtol=1e-5, atol=1e-7)


def test_fixed_h_requires_second_derivative():
    model = ThermoModel(GammaLaw(K=1.0, gamma=2.0), mu_convention="fixed-h")
    with pytest.raises(ValueError, match="S''"):
        model.point_S(np.array([1.0]), np.array([0.0]), np.array([0.2]))
    pt = model.point_S(np.array([1.0]), np.array([0.0]), np.array([0.0]))
    assert pt.I[0] == 0.0 and pt.I_mu[0] == 0.0


def test_unknown_convention_rejected():
    with pytest.raises(ValueError, match="mu_convention"):
        ThermoModel(GammaLaw(K=1.0, gamma=2.0), mu_convention="fixed-s")


@pytest.fixture(scope="module")
def entropy_runs():
    from eulerblow import pipeline
    from eulerblow.config import load_config, set_dotted
    base = load_config(CONFIG_DIR / "tanh_synthetic_N.yaml")
    return {conv: pipeline.simulate(set_dotted(base, "thermo.mu_convention", conv))
            for conv in ("fixed-tau", "fixed-h")}


def _backward_window(res):
    from eulerblow.solver import trace_characteristic
    seed = next(s for s in res.trajectory.info["seeds"] if s["direction"] == "backward")
    return trace_characteristic(res.trajectory, seed["x"], "backward").agreement_window(0.05, 10.0)


def test_fixed_h_trace_matches_field_on_entropy_run(entropy_runs):
    res = entropy_runs["fixed-h"]
    assert res.report.status == "blew-up" and res.report.criterion
    _, worst, reached = _backward_window(res)
    assert reached and worst < 0.05


def test_fixed_tau_trace_drifts_on_entropy_run(entropy_runs):
    # documents the inexact decomposition; the isentropic case is unaffected
    _, worst, _ = _backward_window(entropy_runs["fixed-tau"])
    assert worst > 0.05


def test_fixed_h_threshold_admits_complex_roots(entropy_runs):
    th = entropy_runs["fixed-h"].setup.threshold
    assert th.complex_count > 0 and th.N > 0
    assert entropy_runs["fixed-tau"].setup.threshold.complex_count == 0
