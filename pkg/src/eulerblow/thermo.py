"""Derived thermodynamic fields: c, h, the correction integrals I and I_mu, s/r, y/q.

Conventions
-----------
``P = -p_tau`` and ``c = sqrt(P)``. The ``h`` integral is anchored at
``tau = inf`` (``h -> 0`` there), so ``I`` and ``I_mu`` are pure tail integrals.
Entropy derivatives default to the fixed-tau assembly of
:func:`eulerblow.eos.hypotheses.mu_partials`; :class:`ThermoModel` can
instead take x-derivatives at fixed h (see :func:`fixed_h_parts`).

``I`` has two quadrature routes that must agree: the direct integrand and
an integrated-by-parts form with a boundary term. ``I_mu`` is the
``mu``-derivative of the by-parts form.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator, RegularGridInterpolator

from .eos.hypotheses import mu_partials
from .eos.profiles import ConstantEntropy
from .quadrature import DivergenceError, tail_integral

MU_CONVENTIONS = ("fixed-tau", "fixed-h")

__all__ = [
    "ThermoPoint",
    "GradientPair",
    "ThermoModel",
    "sound_speed",
    "compute_h",
    "compute_I",
    "compute_I_ibp",
    "compute_I_mu",
    "compute_h_S",
    "fixed_h_parts",
    "MU_CONVENTIONS",
    "riemann_invariants",
    "gradient_pair",
]


def _state(profile, x):
    profile = profile if profile is not None else ConstantEntropy()
    x = np.asarray(x, dtype=float)
    return np.asarray(profile.S(x), dtype=float), np.asarray(profile.dS(x), dtype=float)


def _tail(f, tau, what):
    try:
        return tail_integral(f, tau)
    except DivergenceError as exc:
        raise DivergenceError(f"{what}: {exc}") from None


def sound_speed(law, tau, x=0.0, profile=None):
    """c = sqrt(-p_tau(tau, S(x)))."""
    S, _ = _state(profile, x)
    return law.sound_speed(tau, S)


def _h_quadrature(law, tau, S):
    tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), S)
    Sb = S[..., None]

    def f(xi):
        return np.sqrt(-law.partials(xi, Sb).p_tau)

    return _tail(f, tau, "h integral diverges (sqrt(-p_tau) does not decay; H2 fails)")


def compute_h(law, tau, x=0.0, profile=None, method="auto"):
    """h(tau, x) = integral of sqrt(-p_xi(xi, S(x))) from tau to infinity.

    Parameters
    ----------
    method : {"auto", "closed", "quadrature"}
        ``auto`` uses the law's closed form when it has one.
    """
    S, _ = _state(profile, x)
    if method in ("auto", "closed"):
        h = law.h_closed(tau, S)
        if h is not None:
            return h
        if method == "closed":
            raise ValueError(f"{law!r} has no closed form for h")
    return _h_quadrature(law, tau, S)


def _direct_integrand(law, S, dS):
    def f(xi):
        P = law.partials(xi, S)
        mu = mu_partials(P, dS)
        Pt = -P.p_tau
        return -0.5 * Pt**-0.25 * mu["p_taumu"] - 0.25 * Pt**-1.25 * P.p_tautau * mu["p_mu"]
    return f


def _ibp_integrand(law, S, dS):
    def f(xi):
        P = law.partials(xi, S)
        return (-P.p_tau) ** -1.25 * P.p_tautau * (P.p_S * dS)
    return f


def _prep(tau, S, dS):
    tau, S, dS = np.broadcast_arrays(np.asarray(tau, dtype=float), S, dS)
    return tau, S, dS


def compute_I(law, profile, tau, x, method="auto"):
    """Correction integral I(tau, x) anchored at tau = infinity.

    Parameters
    ----------
    method : {"auto", "closed", "direct", "ibp"}
        ``direct`` integrates the defining integrand
        ``-1/2 P^(-1/4) p_ximu - 1/4 P^(-5/4) p_xixi p_mu``; ``ibp`` uses the
        boundary term ``1/2 P^(-1/4) p_mu`` plus ``-1/8`` times the tail of
        ``P^(-5/4) p_xixi p_mu``.
    """
    S, dS = _state(profile, x)
    if method in ("auto", "closed"):
        val = law.I_closed(tau, S, dS)
        if val is not None:
            return val
        if method == "closed":
            raise ValueError(f"{law!r} has no closed form for I")
    if method == "ibp":
        return compute_I_ibp(law, profile, tau, x)
    tau, S, dS = _prep(tau, S, dS)
    out = np.zeros(tau.shape)
    nz = dS != 0
    if np.any(nz):
        f = _direct_integrand(law, S[nz][..., None], dS[nz][..., None])
        out[nz] = _tail(f, tau[nz], "I integral diverges (P^(-1/4) p_ximu or P^(-5/4) p_xixi p_mu does not decay)")
    return out


def compute_I_ibp(law, profile, tau, x):
    """I by the integrated-by-parts route; independent of the direct integrand."""
    S, dS = _state(profile, x)
    tau, S, dS = _prep(tau, S, dS)
    out = np.zeros(tau.shape)
    nz = dS != 0
    if np.any(nz):
        t, s, d = tau[nz], S[nz], dS[nz]
        P = law.partials(t, s)
        boundary = 0.5 * (-P.p_tau) ** -0.25 * P.p_S * d
        tail = _tail(_ibp_integrand(law, s[..., None], d[..., None]), t,
                     "I integral diverges (P^(-5/4) p_xixi p_mu does not decay)")
        out[nz] = boundary - 0.125 * tail
    return out


def compute_I_mu(law, profile, tau, x, method="auto"):
    """I_mu(tau, x): entropy-direction derivative of I at fixed tau.

    Boundary term ``1/2 [1/4 P^(-5/4) p_taumu p_mu + P^(-1/4) p_mumu]`` minus
    ``1/8`` times the tail of
    ``5/4 P^(-9/4) p_ximu p_xixi p_mu + P^(-5/4) p_xixiu p_mu + P^(-5/4) p_xixi p_mumu``.
    """
    S, dS = _state(profile, x)
    if method in ("auto", "closed"):
        val = law.I_mu_closed(tau, S, dS)
        if val is not None:
            return val
        if method == "closed":
            raise ValueError(f"{law!r} has no closed form for I_mu")
    tau, S, dS = _prep(tau, S, dS)
    out = np.zeros(tau.shape)
    nz = dS != 0
    if not np.any(nz):
        return out
    t, s, d = tau[nz], S[nz], dS[nz]
    P = law.partials(t, s)
    mu = mu_partials(P, d)
    Pt = -P.p_tau
    boundary = 0.5 * (0.25 * Pt**-1.25 * mu["p_taumu"] * mu["p_mu"] + Pt**-0.25 * mu["p_mumu"])
    sb, db = s[..., None], d[..., None]

    def f(xi):
        Q = law.partials(xi, sb)
        m = mu_partials(Q, db)
        Qt = -Q.p_tau
        return (1.25 * Qt**-2.25 * m["p_taumu"] * Q.p_tautau * m["p_mu"]
                + Qt**-1.25 * m["p_tautaumu"] * m["p_mu"]
                + Qt**-1.25 * Q.p_tautau * m["p_mumu"])

    tail = _tail(f, t, "I_mu integral diverges")
    out[nz] = boundary - 0.125 * tail
    return out


def riemann_invariants(u, h):
    """Return ``(s, r) = (u + h, u - h)``."""
    u = np.asarray(u, dtype=float)
    h = np.asarray(h, dtype=float)
    return u + h, u - h


@dataclass
class GradientPair:
    y: np.ndarray
    q: np.ndarray


def gradient_pair(s_x, r_x, c, p_mu, I):
    """y = sqrt(c) s_x + p_mu/sqrt(c) - I,  q = sqrt(c) r_x - p_mu/sqrt(c) + I."""
    sc = np.sqrt(np.asarray(c, dtype=float))
    corr = np.asarray(p_mu, dtype=float) / sc - np.asarray(I, dtype=float)
    return GradientPair(sc * np.asarray(s_x) + corr, sc * np.asarray(r_x) - corr)


@dataclass
class ThermoPoint:
    """Thermodynamic state with the entropy-direction partials needed downstream.

    ``p_mu``, ``p_taumu`` (the tau-derivative of ``p_mu`` at fixed x), ``I``
    and ``I_mu`` follow ``convention``; ``p_mumu`` and ``p_tautaumu`` are
    always the fixed-tau assembly used by the hypothesis checks.
    """

    tau: np.ndarray
    x: np.ndarray
    S: np.ndarray
    dS: np.ndarray
    c: np.ndarray
    p: np.ndarray
    h: np.ndarray
    I: np.ndarray
    I_mu: np.ndarray
    p_tau: np.ndarray
    p_tautau: np.ndarray
    p_tau3: np.ndarray
    p_mu: np.ndarray
    p_taumu: np.ndarray
    p_tautaumu: np.ndarray
    p_mumu: np.ndarray
    convention: str = "fixed-tau"


def compute_h_S(law, tau, S):
    """Entropy derivative of h at fixed tau: tail integral of ``-p_xiS / (2c)``."""
    closed = law.fixed_h_closed(tau, S)
    if closed is not None:
        return closed[0]
    tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(S, dtype=float))
    Sb = S[..., None]

    def f(xi):
        P = law.partials(xi, Sb)
        return -0.5 * P.p_tauS / np.sqrt(-P.p_tau)

    return _tail(f, tau, "h_S integral diverges")


def _G(P):
    """tau-derivative of (p_S - c h_S)/c; local because d(h_S)/dtau = -c_S."""
    c = np.sqrt(-P.p_tau)
    return 0.5 * P.p_tauS / c + 0.5 * P.p_S * P.p_tautau / c**3


def _J_quadrature(law, tau, S):
    tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(S, dtype=float))
    Sb = S[..., None]

    def f(xi):
        P = law.partials(xi, Sb)
        return -0.5 * (-P.p_tau) ** 0.25 * _G(P)

    return _tail(f, tau, "fixed-h I integral diverges")


def fixed_h_parts(law, tau, S, rel_step=1e-4):
    """Per-unit pieces ``(h_S, J, K)`` of the fixed-h entropy derivatives.

    With ``x``-derivatives taken at fixed ``h``:
    ``p_mu = S' (p_S - c h_S)``, ``I = S' J`` and ``I_mu = S'' J + S'^2 K``,
    where ``J = -int_tau^inf (sqrt(c)/2) G`` and ``K = J_S + h_S J_tau / c``.
    ``J_S`` is a centred difference in S when no closed form exists.
    """
    closed = law.fixed_h_closed(tau, S)
    if closed is not None:
        return closed
    tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(S, dtype=float))
    h_S = compute_h_S(law, tau, S)
    J = _J_quadrature(law, tau, S)
    d = rel_step * np.maximum(1.0, np.abs(S))
    J_S = (_J_quadrature(law, tau, S + d) - _J_quadrature(law, tau, S - d)) / (2.0 * d)
    P = law.partials(tau, S)
    c = np.sqrt(-P.p_tau)
    J_tau = 0.5 * np.sqrt(c) * _G(P)
    return h_S, J, J_S + h_S * J_tau / c


def _unit_tables(law, convention, tau, S):
    """Per-unit-S' tables at arrays of (tau, S) by direct evaluation."""
    h = _h_quadrature(law, tau, S)
    if convention == "fixed-h":
        h_S, J, K = fixed_h_parts(law, tau, S)
        return {"h": h, "h_S": h_S, "J": J, "K": K}
    flat_t, flat_S = np.ravel(tau), np.ravel(S)
    prof = _Pointwise(flat_S, np.ones_like(flat_S))
    idx = np.arange(flat_t.size)
    I1 = compute_I(law, prof, flat_t, idx, method="direct").reshape(np.shape(tau))
    Im2 = compute_I_mu(law, prof, flat_t, idx, method="ibp").reshape(np.shape(tau))
    return {"h": h, "I1": I1, "Imu2": Im2}


class ThermoModel:
    """Evaluator for h, I and I_mu with a memo lattice for laws lacking closed forms.

    ``mu_convention`` selects how x-derivatives of state functions are
    taken: ``"fixed-tau"`` (``p_mu = p_S S'``, no ``S''`` term) or
    ``"fixed-h"``, in which the Riccati decomposition of y and q is exact.

    The lattice spans ``[tau_lo, tau_hi] x [S_lo, S_hi]`` (geometric in tau)
    and stores per-unit values: ``h``, ``I`` per unit ``S'`` and ``I_mu``
    per unit ``S'^2`` under fixed-tau; ``h``, ``h_S``, ``J``, ``K`` under
    fixed-h. Interpolation is shape-preserving cubic in ``log tau`` and in
    ``S``. Points outside the tau range are evaluated directly.
    """

    def __init__(self, law, profile=None, tau_range=None, S_range=None,
                 tau_points=257, S_points=33, use_closed=True, mu_convention="fixed-tau"):
        if mu_convention not in MU_CONVENTIONS:
            raise ValueError(f"mu_convention must be one of {MU_CONVENTIONS}, got {mu_convention!r}")
        self.law = law
        self.profile = profile if profile is not None else ConstantEntropy()
        self.mu_convention = mu_convention
        if mu_convention == "fixed-h":
            has_closed = law.fixed_h_closed(1.0, 0.0) is not None
        else:
            has_closed = law.I_closed(1.0, 0.0, 1.0) is not None
        self.closed = bool(use_closed and law.h_closed(1.0, 0.0) is not None and has_closed)
        self._tables = None
        if self.closed or tau_range is None:
            return
        self.tau_range = (float(tau_range[0]), float(tau_range[1]))
        s_lo, s_hi = S_range if S_range is not None else (0.0, 0.0)
        self._build(int(tau_points), float(s_lo), float(s_hi), int(S_points))

    def _build(self, n_tau, s_lo, s_hi, n_S):
        tau = np.geomspace(*self.tau_range, n_tau)
        logt = np.log(tau)
        if s_hi <= s_lo:
            vals = _unit_tables(self.law, self.mu_convention, tau, np.full_like(tau, s_lo))
            self._tables = {k: _Pchip1(logt, v) for k, v in vals.items()}
            return
        Sg = np.linspace(s_lo, s_hi, n_S)
        T, SS = np.meshgrid(tau, Sg, indexing="ij")
        vals = _unit_tables(self.law, self.mu_convention, T, SS)
        kw = dict(method="pchip", bounds_error=False, fill_value=None)
        self._tables = {k: RegularGridInterpolator((logt, Sg), v, **kw) for k, v in vals.items()}

    def _lattice_eval(self, interp, tau, S):
        pts = np.stack(np.broadcast_arrays(np.log(tau), S), axis=-1)
        return interp(pts)

    def _inside(self, tau):
        lo, hi = self.tau_range
        return (tau >= lo) & (tau <= hi)

    def unit_tables(self, tau, S):
        """Per-unit tables at (tau, S): lattice inside its range, direct outside."""
        law = self.law
        tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(S, dtype=float))
        if self.closed:
            h = law.h_closed(tau, S)
            if self.mu_convention == "fixed-h":
                h_S, J, K = law.fixed_h_closed(tau, S)
                return {"h": h, "h_S": h_S, "J": J, "K": K}
            return {"h": h, "I1": law.I_closed(tau, S, 1.0), "Imu2": law.I_mu_closed(tau, S, 1.0)}
        inside = self._inside(tau) if self._tables is not None else np.zeros(tau.shape, dtype=bool)
        out = {}
        if np.any(inside):
            for k, interp in self._tables.items():
                out[k] = np.empty(tau.shape)
                out[k][inside] = self._lattice_eval(interp, tau[inside], S[inside])
        if np.any(~inside):
            direct = _unit_tables(law, self.mu_convention, tau[~inside], S[~inside])
            for k, v in direct.items():
                out.setdefault(k, np.empty(tau.shape))[~inside] = v
        return out

    def quantities(self, tau, S, dS, d2S=None):
        """Return ``(h, I, I_mu)`` at arrays of (tau, S, S') (and S'' under fixed-h)."""
        tau, S, dS = _prep(tau, S, dS)
        t = self.unit_tables(tau, S)
        if self.mu_convention == "fixed-tau":
            return t["h"], dS * t["I1"], dS**2 * t["Imu2"]
        d2S = self._need_d2S(d2S, dS)
        return t["h"], dS * t["J"], d2S * t["J"] + dS**2 * t["K"]

    def _need_d2S(self, d2S, dS):
        if d2S is None:
            if np.any(dS != 0):
                raise ValueError("the fixed-h convention needs S'' wherever S' != 0")
            return np.zeros(dS.shape)
        return np.broadcast_to(np.asarray(d2S, dtype=float), dS.shape)

    def point(self, tau, x):
        """Full :class:`ThermoPoint` at ``(tau, x)``."""
        tau = np.asarray(tau, dtype=float)
        x = np.asarray(x, dtype=float)
        S, dS = _state(self.profile, x)
        return self.point_S(tau, S, dS, x)

    def point_S(self, tau, S, dS, x=None, d2S=None):
        """ThermoPoint from (tau, S, S'); ``S''`` defaults to the profile's at ``x``."""
        tau, S, dS = _prep(tau, S, dS)
        P = self.law.partials(tau, S)
        if np.any(~(P.p_tau < 0)):
            bad = np.flatnonzero(~(np.ravel(P.p_tau) < 0))[0]
            raise ValueError(f"p_tau >= 0 at tau={np.ravel(tau)[bad]:.6g}; sound speed undefined")
        mu = mu_partials(P, dS)
        c = np.sqrt(-P.p_tau)
        t = self.unit_tables(tau, S)
        if self.mu_convention == "fixed-tau":
            h, I, Imu = t["h"], dS * t["I1"], dS**2 * t["Imu2"]
        else:
            if d2S is None and x is not None and np.any(dS != 0):
                d2S = self.profile.d2S(np.broadcast_to(x, tau.shape))
            d2S = self._need_d2S(d2S, dS)
            h, I, Imu = t["h"], dS * t["J"], d2S * t["J"] + dS**2 * t["K"]
            mu["p_mu"] = dS * (P.p_S - c * t["h_S"])
            mu["p_taumu"] = dS * (0.5 * P.p_tauS + 0.5 * P.p_tautau * t["h_S"] / c)
        return ThermoPoint(
            tau=tau, x=np.zeros(tau.shape) if x is None else np.broadcast_to(x, tau.shape),
            S=S, dS=dS, c=c, p=np.asarray(P.p, dtype=float), h=h, I=I, I_mu=Imu,
            p_tau=P.p_tau, p_tautau=P.p_tautau, p_tau3=P.p_tau3, **mu,
            convention=self.mu_convention,
        )


class _Pchip1:
    """1-D PCHIP in log tau with the RegularGridInterpolator call signature."""

    def __init__(self, logt, vals):
        self._f = PchipInterpolator(logt, vals, extrapolate=True)

    def __call__(self, pts):
        return self._f(pts[..., 0])


class _Affine(ConstantEntropy):
    """Profile with constant S and unit S', used to tabulate per-unit-S' values."""

    def __init__(self, value):
        super().__init__(value)

    @property
    def isentropic(self):
        return False

    def dS(self, x):
        return np.ones(np.shape(x))


class _Pointwise(ConstantEntropy):
    """Profile that returns prescribed (S, S') by integer index."""

    def __init__(self, S, dS):
        super().__init__(0.0)
        self._S = np.asarray(S, dtype=float)
        self._dS = np.asarray(dS, dtype=float)

    @property
    def isentropic(self):
        return False

    def S(self, x):
        return self._S[np.asarray(x, dtype=int)]

    def dS(self, x):
        return self._dS[np.asarray(x, dtype=int)]
