import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerblow.eos import (
    ConstantEntropy,
    DeclaredConstants,
    ExpressionLaw,
    GammaLaw,
    SineBumpEntropy,
    SmoothedPiecewiseLinearEntropy,
    StateBox,
    StiffenedGas,
    TanhEntropy,
    check_all,
    check_h1,
    check_h2,
    check_h3,
    check_h4,
    derivative_consistency,
    law_from_config,
    mu_partials,
    profile_from_config,
)

BOX = StateBox(0.5, 2.0, -3.0, 3.0)


# --- laws -------------------------------------------------------------------

def test_gamma_partials_closed_form():
    P = GammaLaw(1.0, 2.0).partials(1.0, 0.0)
    assert float(P.p) == 1.0
    assert float(P.p_tau) == -2.0
    assert float(P.p_tautau) == 6.0
    assert float(P.p_tau3) == -24.0


@given(tau=st.floats(0.05, 20.0), S=st.floats(-1.0, 1.0), g=st.floats(1.1, 3.5))
@settings(max_examples=50, deadline=None)
def test_gamma_signs(tau, S, g):
    P = GammaLaw(1.3, g).partials(tau, S)
    assert P.p > 0 and P.p_tau < 0 and P.p_tautau > 0


def test_expression_law_matches_gamma():
    g = GammaLaw(1.0, 1.4)
    e = ExpressionLaw("exp(S) * tau**(-1.4)")
    tau = np.geomspace(0.1, 10, 7)
    a, b = g.partials(tau, 0.3), e.partials(tau, 0.3)
    for name in ("p", "p_tau", "p_tautau", "p_tau3", "p_S", "p_tauS", "p_SS", "p_tautauS"):
        np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=1e-13)


def test_stiffened_reduces_to_gamma():
    a = StiffenedGas(1.0, 1.4, p_inf=0.0).partials(0.7, 0.1)
    b = GammaLaw(1.0, 1.4).partials(0.7, 0.1)
    assert float(a.p) == pytest.approx(float(b.p), rel=1e-15)


def test_law_from_config_errors():
    with pytest.raises(ValueError, match="unknown pressure law"):
        law_from_config("ideal", {})
    with pytest.raises(ValueError, match="bad parameters"):
        law_from_config("gamma-law", {"gama": 2})
    with pytest.raises(ValueError):
        law_from_config("gamma-law", {"gamma": 0.9})


def test_declared_constants_validation():
    with pytest.raises(ValueError):
        DeclaredConstants(k=1.0)
    with pytest.raises(ValueError):
        DeclaredConstants(A=-1.0)


@pytest.mark.parametrize("law,tau", [(GammaLaw(1.0, 2.0), 1.0), (GammaLaw(1.0, 1.4), 0.3)])
def test_derivative_consistency_gamma(law, tau):
    worst, per = derivative_consistency(law, StateBox(0.5 * tau, 2 * tau, -1, 1), n=6,
                                        profile=TanhEntropy(0.3))
    assert worst < 1e-6
    assert set(per) >= {"p_tau", "p_tautau", "p_tau3", "p_S"}


def test_derivative_consistency_constant_pressure():
    worst, _ = derivative_consistency(ExpressionLaw("1 + 0*tau"), StateBox(0.5, 2.0), n=4)
    assert worst == 0.0


# --- profiles ---------------------------------------------------------------

def test_tanh_segments_and_variation():
    prof = TanhEntropy(0.5, 0.0, 1.0)
    assert len(prof.monotone_segments(-3, 3)) == 1
    # |log m| increment with m = exp(S/2); frozen from tests/oracles/generate.py
    V = 0.49752737684336522567
    assert prof.total_variation(-3, 3) == pytest.approx(V, rel=1e-12)
    assert prof.total_variation_increments(-3, 3) == pytest.approx(V, rel=1e-12)


@pytest.mark.parametrize("prof", [
    SineBumpEntropy(0.2, 2.0, 4.0),
    SmoothedPiecewiseLinearEntropy([[-2.0, 0.0], [0.0, 0.3], [1.0, -0.1], [2.5, 0.2]], 0.2),
    TanhEntropy(0.4, 0.3, 0.7),
])
def test_variation_quadrature_matches_increments(prof):
    q = prof.total_variation(-4, 4)
    assert q == pytest.approx(prof.total_variation_increments(-4, 4), rel=1e-8)
    # refinement invariance
    assert prof.total_variation(-4, 4, n_panels=64) == pytest.approx(q, rel=1e-8)


@pytest.mark.parametrize("prof", [
    SineBumpEntropy(0.2, 2.0, 4.0),
    SmoothedPiecewiseLinearEntropy([[-2.0, 0.0], [0.0, 0.3], [1.0, -0.1], [2.5, 0.2]], 0.2),
    TanhEntropy(0.4, 0.3, 0.7),
])
def test_second_derivative_matches_difference_of_first(prof):
    x = np.linspace(-3.7, 3.7, 41)
    d = 1e-5
    fd = (prof.dS(x + d) - prof.dS(x - d)) / (2 * d)
    np.testing.assert_allclose(prof.d2S(x), fd, atol=1e-7)


def test_constant_entropy_second_derivative_zero():
    assert np.all(ConstantEntropy().d2S(np.linspace(-1, 1, 5)) == 0)


def test_sine_bump_segments_alternate():
    segs = SineBumpEntropy(0.2, 2.0, 4.0).monotone_segments(-4, 4)
    signs = [s.sign for s in segs if s.sign != 0]
    assert len(signs) > 2
    assert all(a == -b for a, b in zip(signs, signs[1:]))


def test_m_bounds_order():
    lo, hi = TanhEntropy(0.5).m_bounds(-3, 3)
    assert 0 < lo <= hi
    assert ConstantEntropy().m_bounds(-3, 3) == (1.0, 1.0)


def test_profile_from_config():
    assert isinstance(profile_from_config("tanh", {"amplitude": 1.0}), TanhEntropy)
    with pytest.raises(ValueError):
        profile_from_config("wiggly", {})


def test_mu_partials_no_second_derivative_term():
    P = GammaLaw(1.0, 2.0).partials(1.0, 0.0)
    mu = mu_partials(P, 2.0)
    assert float(mu["p_mu"]) == 2.0 * float(P.p_S)
    assert float(mu["p_mumu"]) == 4.0 * float(P.p_SS)


# --- hypothesis checkers ----------------------------------------------------

def test_h1_gamma_pass():
    assert check_h1(GammaLaw(1.0, 2.0), BOX).passed
    assert check_h1(GammaLaw(1.0, 1.4), StateBox(0.1, 10.0)).passed


def test_h1_fails_increasing_pressure():
    rep = check_h1(ExpressionLaw("tau"), StateBox(1.0, 2.0))
    assert not rep.passed
    assert rep["H1.1"].witness["tau"] == pytest.approx(1.0)


def test_h1_limits_indicative():
    rep = check_h1(GammaLaw(1.0, 2.0), BOX)
    assert "indicative" in rep["H1.3"].status


@pytest.mark.parametrize("g,beta", [(2.0, 1.5), (3.0, 2.0)])
def test_h2_gamma(g, beta):
    rep = check_h2(GammaLaw(1.0, g))
    assert rep.passed
    assert rep["H2.1"].best_constant["exponent"] == pytest.approx((g + 1) / 2, rel=1e-6)
    assert rep["H2.2"].best_constant["exponent"] == pytest.approx(beta, rel=1e-6)


def test_h2_gamma2_tail_value():
    rep = check_h2(GammaLaw(1.0, 2.0))
    # int_1^inf sqrt(2) xi^-3/2 = 2 sqrt(2)
    assert rep.partial_sums["far"][-1] == pytest.approx(2 * np.sqrt(2), rel=1e-6)


def test_h2_fails_log_pressure():
    # p = -log(tau) + const has sqrt(-p_tau) = tau^-1/2: integrable at 0
    rep = check_h2(ExpressionLaw("10 - log(tau)"))
    assert not rep["H2.1"].passed


@pytest.mark.parametrize("g", [1.4, 2.0, 3.0])
def test_h3_k_best_gamma(g):
    rep = check_h3(GammaLaw(1.0, g), StateBox(0.1, 10.0), constants=DeclaredConstants(k=8.0, l1=100, l2=1e-3))
    best = rep["H3.3"].best_constant
    assert best["k"] == pytest.approx(2 * g / (g - 1), rel=1e-10)
    assert best["k_spread"] < 1e-10 * best["k"]


def test_h3_gamma2_box_constants():
    rep = check_h3(GammaLaw(1.0, 2.0), BOX, constants=DeclaredConstants(l1=3.0, l2=0.75))
    assert rep.passed
    assert rep["H3.2"].best_constant["l1"] == pytest.approx(3.0, rel=1e-12)
    assert rep["H3.1"].best_constant["l2"] == pytest.approx(0.75, rel=1e-12)
    # ratio p p_tautau / c^(7/2) varies across the box: edge warning
    assert rep["H3.2"].notes
    assert rep["H3.4"].best_constant["A"] == pytest.approx(1.0 / 3.0, rel=1e-10)


def test_h3_declared_k_too_small():
    rep = check_h3(GammaLaw(1.0, 2.0), BOX, constants=DeclaredConstants(k=2.0, l1=3.0, l2=0.75))
    assert not rep["H3.3"].passed
    assert not rep.passed
    assert rep["H3.3"].witness


def test_h4_vacuous_when_isentropic():
    rep = check_h4(GammaLaw(1.0, 2.0), ConstantEntropy(), BOX)
    assert rep.passed
    assert all(c.status == "vacuous pass" for c in rep.conditions)


def test_h4_tanh_equality_in_first_sandwich():
    rep = check_h4(GammaLaw(1.0, 2.0), TanhEntropy(1.0), BOX, constants=DeclaredConstants(l6=1e6))
    assert rep["H4.1"].passed
    assert rep["H4.1"].margin == pytest.approx(0.0, abs=1e-12)


def test_check_all_has_four_reports():
    reps = check_all(GammaLaw(1.0, 2.0), ConstantEntropy(), BOX, 16,
                     DeclaredConstants(l1=3.0, l2=0.75))
    assert [r.hypothesis for r in reps] == ["H1", "H2", "H3", "H4"]
    assert all(r.passed for r in reps)
    for r in reps:
        for c in r.conditions:
            if c.passed and np.isfinite(c.margin):
                assert c.margin >= -1e-12
        assert isinstance(r.to_dict(), dict)
