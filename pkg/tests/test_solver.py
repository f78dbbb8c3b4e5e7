import numpy as np
import pytest

from eulerblow import pipeline
from eulerblow.config import set_dotted
from eulerblow.eos import ConstantEntropy, GammaLaw, TanhEntropy
from eulerblow.solver import (
    FieldState, Grid, Physics, Trajectory, derived_fields, initial_data, rhs, run,
    step_field, trace_characteristic,
)
from eulerblow.solver.scheme import SolverAbort

LAW2 = GammaLaw(1.0, 2.0)


def _physics(n=128, lo=-1.0, hi=1.0, boundary="periodic", profile=None, law=LAW2):
    g = Grid(lo, hi, n, boundary)
    return Physics(law, profile or ConstantEntropy(), g)


def _const_trajectory(c=1.0, a0=0.0, a1=0.0, a2=0.5, n=64, levels=3, t_end=3.0):
    g = Grid(-10.0, 10.0, n, "periodic")
    shape = (levels, n)
    f = {k: np.full(shape, v) for k, v in (("c", c), ("a0", a0), ("a1", a1), ("a2", a2))}
    f["y"] = np.full(shape, -2.0)
    f["q"] = np.full(shape, -2.0)
    return Trajectory(g, np.linspace(0.0, t_end, levels), np.ones(shape), np.zeros(shape), f)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 8)
    with pytest.raises(ValueError):
        Grid(1.0, 0.0, 32)
    with pytest.raises(ValueError):
        Grid(0.0, 1.0, 32, "reflective")


def test_constant_state_is_fixed_point():
    ph = _physics(boundary="outflow")
    tau, u = np.full(128, 1.3), np.full(128, 0.2)
    dtau, du = rhs(tau, u, ph)
    assert np.all(dtau == 0.0) and np.all(du == 0.0)


def test_periodic_conservation():
    ph = _physics(n=200)
    x = ph.grid.centers
    tau = 1.0 + 0.2 * np.sin(2 * np.pi * x)
    u = 0.1 * np.cos(np.pi * x)
    traj = run(ph, tau, u, 0.4, riccati_trigger=False)
    assert traj.status == "ran-to-horizon"
    T = traj.times[-1]
    for q in (traj.tau, traj.u):
        tot = q.sum(axis=1)
        # relative to the total mass of |q| since sum(u) starts near zero
        drift = np.abs(tot - tot[0]) / np.abs(q[0]).sum()
        assert drift.max() / T < 1e-10


def test_mirror_symmetry():
    g = Grid(-4.0, 4.0, 256, "outflow")
    ph = Physics(LAW2, ConstantEntropy(), g)
    tau, u = initial_data("riemann-smooth", {"left": {"u": 0.4}, "right": {"u": -0.4},
                                             "transition_width": 1.0}, g)
    traj = run(ph, tau, u, 0.8, riccati_trigger=False)
    np.testing.assert_allclose(traj.tau[-1], traj.tau[-1][::-1], rtol=0, atol=1e-12)
    np.testing.assert_allclose(traj.u[-1], -traj.u[-1][::-1], rtol=0, atol=1e-12)
    # the gradient variables swap under reflection
    np.testing.assert_allclose(traj.fields["y"][-1], traj.fields["q"][-1][::-1], atol=1e-9)


def _sine_final(n, T=0.25):
    ph = _physics(n=n, lo=0.0, hi=1.0)
    x = ph.grid.centers
    # exact cell averages of a smooth profile
    dx = ph.grid.dx
    u = 0.05 * (np.cos(2 * np.pi * (x - dx / 2)) - np.cos(2 * np.pi * (x + dx / 2))) / (2 * np.pi * dx)
    traj = run(ph, np.ones(n), u, T, cfl=0.2, riccati_trigger=False)
    assert traj.times[-1] == pytest.approx(T)
    return traj.u[-1]


def test_second_order_self_convergence():
    u64, u128, u256 = (_sine_final(n) for n in (64, 128, 256))

    def restrict(v):
        return 0.5 * (v[0::2] + v[1::2])

    e1 = np.abs(restrict(u128) - u64).mean()
    e2 = np.abs(restrict(u256) - u128).mean()
    assert np.log2(e1 / e2) > 1.7


def test_tau_floor_abort():
    ph = _physics(n=64)
    state = FieldState(0.0, np.ones(64), np.where(np.abs(ph.grid.centers) < 0.2, 0.0, 0.0))
    state.u[30:34] = [5.0, 5.0, -5.0, -5.0]
    with pytest.raises(SolverAbort, match="below floor"):
        step_field(state, 0.5, ph, tau_floor=0.9)


def test_exact_riccati_blowup_time():
    traj = _const_trajectory()
    path = trace_characteristic(traj, 0.0, "forward", dt=1e-3, coefficient_override={"a2": 0.5})
    assert path.status == "blew-up"
    assert abs(path.t_blowup - 1.0) < 0.01 * 1.0
    mask = path.t < 0.9
    np.testing.assert_allclose(path.value[mask], -2.0 / (1 - path.t[mask]), rtol=1e-10)


def test_riccati_integrator_fourth_order():
    a1, a2, w0 = 0.3, 0.5, -0.5
    exact = np.log(1 - a1 * w0 / a2) / a1
    traj = _const_trajectory(a1=a1)
    errs = []
    for dt in (0.025, 0.0125, 0.00625):
        p = trace_characteristic(traj, 0.0, "forward", dt=dt, coefficient_override={"a1": a1, "a2": a2})
        errs.append(abs(p.t_blowup - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 3.5), (errs, orders)


def test_characteristics_are_straight_for_constant_c():
    traj = _const_trajectory(c=1.5, a2=0.0)
    fwd = trace_characteristic(traj, 1.0, "forward", dt=0.01, t_end=2.0)
    bwd = trace_characteristic(traj, 1.0, "backward", dt=0.01, t_end=2.0)
    np.testing.assert_allclose(fwd.x, 1.0 + 1.5 * fwd.t, atol=1e-12)
    np.testing.assert_allclose(bwd.x, 1.0 - 1.5 * bwd.t, atol=1e-12)
    assert fwd.status == "reached-end"


def test_seed_outside_domain():
    traj = _const_trajectory()
    with pytest.raises(ValueError, match="outside"):
        trace_characteristic(traj, 11.0)
    with pytest.raises(ValueError):
        trace_characteristic(traj, 0.0, "sideways")


def test_zero_data_runs_to_horizon(small_cfg):
    cfg = set_dotted(small_cfg, "initial.params.amplitude", 0.0)
    res = pipeline.simulate(cfg)
    assert res.trajectory.status == "ran-to-horizon"
    assert res.trajectory.blowup is None
    assert res.exit_code == 0


def test_gradient_sentinel(small_cfg):
    st = pipeline.prepare(set_dotted(small_cfg, "horizon_time", 3.0))
    y0 = np.abs(st.initial["q"]).max()
    traj = run(st.physics, st.tau0, st.u0, 3.0, sentinel=3 * y0, riccati_trigger=False)
    assert traj.status == "blew-up"
    assert traj.blowup["trigger"] == "gradient-sentinel"
    lo, hi = traj.blowup["bracket"]
    assert lo < hi == traj.blowup["time"]


def test_forward_backward_mirror_traces():
    g = Grid(-4.0, 4.0, 256, "outflow")
    ph = Physics(LAW2, ConstantEntropy(), g)
    tau, u = initial_data("riemann-smooth", {"left": {"u": 0.4}, "right": {"u": -0.4}}, g)
    traj = run(ph, tau, u, 1.0, riccati_trigger=False)
    f = trace_characteristic(traj, -0.5, "forward")
    b = trace_characteristic(traj, 0.5, "backward")
    np.testing.assert_allclose(f.value, b.value, rtol=1e-8)
    np.testing.assert_allclose(f.x, -b.x, atol=1e-10)


def test_entropy_riemann_invariant_rate():
    """Measured forward rate of s on a pressure-gradient-free state.

    With tau and u uniform, s_t = -p_S S' exactly, so along dx/dt = c the
    rate is -p_S S' + c h_S S'. For gamma = 2 and c_v = 1 this equals p S'.
    """
    prof = TanhEntropy(0.5, 0.0, 1.0)
    g = Grid(-3.0, 3.0, 400, "outflow")
    ph = Physics(LAW2, prof, g)
    tau, u = np.ones(g.n_cells), np.zeros(g.n_cells)
    dt = 1e-5
    s0 = derived_fields(tau, u, ph)["s"]
    new = step_field(FieldState(0.0, tau, u), dt, ph)
    d = derived_fields(new.tau, new.u, ph)
    s_t = (d["s"] - s0) / dt
    c0 = derived_fields(tau, u, ph)["c"]
    s_x = np.gradient(s0, g.dx)
    rate = (s_t + c0 * s_x)[50:-50]
    x = g.centers[50:-50]
    S, dS = prof.S(x), prof.dS(x)
    p = np.exp(S)
    np.testing.assert_allclose(rate, p * dS, rtol=2e-3, atol=1e-4)
