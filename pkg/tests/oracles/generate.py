"""Independent high-precision oracles for the frozen values in the test suite.

Run ``python3 tests/oracles/generate.py`` to reprint them. Nothing here
imports eulerblow: pressure derivatives come from sympy, integrals from
mpmath quadrature at 30 digits, entropy-direction derivatives from
mpmath numerical differentiation.
"""

import mpmath as mp
import sympy as sp

mp.mp.dps = 30

tau_s, S_s = sp.symbols("tau S", positive=True)


def gamma_law(K, g, c_v=1):
    return K * sp.exp(S_s / c_v) * tau_s ** (-g)


def lambdas(p):
    d = {
        "p": p,
        "p_tau": sp.diff(p, tau_s),
        "p_tautau": sp.diff(p, tau_s, 2),
        "p_S": sp.diff(p, S_s),
        "p_tauS": sp.diff(p, tau_s, S_s),
        "p_tautauS": sp.diff(p, tau_s, 2, S_s),
        "p_SS": sp.diff(p, S_s, 2),
    }
    return {k: sp.lambdify((tau_s, S_s), v, "mpmath") for k, v in d.items()}


def tail(f, tau):
    """int_tau^inf f by xi = tau e^v, which turns power-law tails into exponential ones."""
    return mp.quad(lambda v: f(tau * mp.exp(v)) * tau * mp.exp(v), [0, 1, 4, 16, mp.inf])


def h(L, tau, S):
    return tail(lambda xi: mp.sqrt(-L["p_tau"](xi, S)), tau)


def I_direct(L, tau, S, dS):
    """I from its defining integrand, anchored at infinity."""
    def f(xi):
        P = -L["p_tau"](xi, S)
        return -0.5 * P ** mp.mpf(-0.25) * L["p_tauS"](xi, S) * dS - 0.25 * P ** mp.mpf(-1.25) * L["p_tautau"](xi, S) * L["p_S"](xi, S) * dS
    return tail(f, tau)


def riccati_roots(L, tau, S, dS):
    """Roots of a0 + a1 y - a2 y^2 via the defining (direct) coefficient formulas."""
    tau, S, dS = mp.mpf(tau), mp.mpf(S), mp.mpf(dS)
    P = -L["p_tau"](tau, S)
    ptt = L["p_tautau"](tau, S)
    p_mu = L["p_S"](tau, S) * dS
    p_taumu = L["p_tauS"](tau, S) * dS
    I = I_direct(L, tau, S, dS)
    I_mu = dS * mp.diff(lambda s: I_direct(L, tau, s, dS), S)
    c = mp.sqrt(P)
    sc = mp.sqrt(c)
    c_h = ptt / (2 * P)
    pmuc_h = -p_taumu / P - ptt * p_mu / (2 * P**2)
    I_h = -0.5 * P ** mp.mpf(-0.75) * p_taumu - 0.25 * P ** mp.mpf(-1.75) * ptt * p_mu
    a2 = c_h / (2 * sc)
    a1 = -(c_h / sc) * I - 2 * sc * I_h
    a0 = -c * I_mu + 0.5 * sc * pmuc_h * p_mu - c * pmuc_h * I - a2 * I**2
    D = a1**2 + 4 * a0 * a2
    r = mp.sqrt(D)
    return (a1 - r) / (2 * a2), (a1 + r) / (2 * a2), I, I_mu


def main():
    print("# h for K=1 gamma-law at S=0")
    for g in (1.4, 2, 3):
        L = lambdas(gamma_law(1, sp.Rational(str(g))))
        for tau in (0.1, 1, 10):
            print(f"h g={g} tau={tau}: {mp.nstr(h(L, mp.mpf(tau), 0), 20)}")

    L2 = lambdas(gamma_law(1, 2))
    amp, width = mp.mpf("0.5"), mp.mpf(1)
    print("# I, I_mu, roots for gamma=2, S = 0.5 tanh(x)")
    for tau, x in ((0.5, 0.0), (1.3, -0.7), (2.0, 1.5)):
        S = amp * mp.tanh(x / width)
        dS = amp / width / mp.cosh(x / width) ** 2
        ym, yp, I, I_mu = riccati_roots(L2, tau, S, dS)
        print(f"tau={tau} x={x}: I={mp.nstr(I, 17)} I_mu={mp.nstr(I_mu, 17)} "
              f"y-={mp.nstr(ym, 17)} y+={mp.nstr(yp, 17)}")

    print("# N_raw on 12x12 grid, box tau [0.5, 2], x [-3, 3], S = 0.5 tanh(x)")
    n = 12
    best = mp.mpf(0)
    for i in range(n):
        tau = mp.mpf("0.5") * mp.mpf(4) ** (mp.mpf(i) / (n - 1))
        for j in range(n):
            x = -3 + 6 * mp.mpf(j) / (n - 1)
            S = amp * mp.tanh(x)
            dS = amp / mp.cosh(x) ** 2
            ym, yp, _, _ = riccati_roots(L2, tau, S, dS)
            best = max(best, abs(ym), abs(yp))
    print(f"N_raw: {mp.nstr(best, 17)}")

    print("# tau_min for gamma=1.4, K=1, S=0, h_max=1 (int_tau^1 c = h_max)")
    L14 = lambdas(gamma_law(1, sp.Rational(7, 5)))
    def g(t):
        return mp.quad(lambda xi: mp.sqrt(-L14["p_tau"](xi, 0)), [t, 1]) - 1
    print(f"tau_min: {mp.nstr(mp.findroot(g, (mp.mpf('0.05'), mp.mpf('0.9')), solver='bisect'), 20)}")

    print("# V for S = 0.5 tanh(x) on [-3, 3] with m = exp(S/2): |log m| increments")
    print(f"V: {mp.nstr(mp.mpf('0.5') * (amp * mp.tanh(3) - amp * mp.tanh(-3)), 20)}")


if __name__ == "__main__":
    main()
