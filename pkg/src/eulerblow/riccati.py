"""Riccati coefficients, root threshold N, envelopes and blow-up time bounds.

Along forward characteristics ``y' = a0 + a1 y - a2 y^2`` and along backward
ones ``q' = a0 - a1 q - a2 q^2``. All three coefficients are computed from a
:class:`~eulerblow.thermo.ThermoPoint` in two ways: through the ratio
formulas ``a1/a2``, ``a0/a2`` (the primary path) and directly from ``c_h``,
``(p_mu/c)_h`` and ``I_h`` (the check path).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .eos.hypotheses import StateBox, sample_box
from .quadrature import finite_integral
from .thermo import ThermoModel, _h_quadrature

__all__ = [
    "DISCRIMINANT_WINDOW",
    "SAFETY_FACTOR",
    "RiccatiCoefficients",
    "ThresholdEstimate",
    "A2Bound",
    "coefficients",
    "coefficients_from_point",
    "coefficients_direct",
    "a2_closed",
    "a2_chain_rule",
    "roots",
    "estimate_N",
    "envelopes",
    "quarter_integral",
    "a2_growth_constants",
    "blowup_time_bound",
]

DISCRIMINANT_WINDOW = 1e-10
SAFETY_FACTOR = 1.05


@dataclass
class RiccatiCoefficients:
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    ratio_a1: np.ndarray
    ratio_a0: np.ndarray
    discriminant: np.ndarray
    y_minus: np.ndarray
    y_plus: np.ndarray
    clamped: np.ndarray
    flagged: np.ndarray


def a2_closed(p_tau, p_tautau):
    """a2 = 1/4 (-p_tau)^(-5/4) p_tautau."""
    return 0.25 * (-np.asarray(p_tau)) ** -1.25 * np.asarray(p_tautau)


def _ratios(pt):
    P = -pt.p_tau
    ptt = pt.p_tautau
    I = pt.I
    ratio_a1 = -2.0 * I + 4.0 * P**0.75 / ptt * pt.p_taumu + 2.0 * P**-0.25 * pt.p_mu
    bracket = pt.p_taumu / P + 0.5 * ptt * pt.p_mu / P**2
    ratio_a0 = (-4.0 * P**1.75 / ptt * (pt.I_mu - bracket * I)
                - 2.0 * np.sqrt(P) / ptt * pt.p_taumu * pt.p_mu
                - pt.p_mu**2 / np.sqrt(P)
                - I**2)
    return ratio_a1, ratio_a0


def coefficients_direct(pt):
    """(a0, a1, a2) from ``c_h``, ``(p_mu/c)_h`` and ``I_h``; independent of the ratio path."""
    P = -pt.p_tau
    c = np.sqrt(P)
    sc = np.sqrt(c)
    c_h = 0.5 * pt.p_tautau / P
    pmuc_h = -pt.p_taumu / P - 0.5 * pt.p_tautau * pt.p_mu / P**2
    I_h = -0.5 * P**-0.75 * pt.p_taumu - 0.25 * P**-1.75 * pt.p_tautau * pt.p_mu
    a2 = c_h / (2.0 * sc)
    a1 = -(c_h / sc) * pt.I - 2.0 * sc * I_h
    a0 = -c * pt.I_mu + 0.5 * sc * pmuc_h * pt.p_mu - c * pmuc_h * pt.I - a2 * pt.I**2
    return a0, a1, a2


def _clamp(D, R1, R0):
    scale = np.maximum(1.0, R1**2 + 4.0 * np.abs(R0))
    window = DISCRIMINANT_WINDOW * scale
    clamped = (D < 0) & (D >= -window)
    flagged = D < -window
    if np.any(clamped):
        warnings.warn(f"clamped {int(np.sum(clamped))} slightly negative discriminant(s) to zero",
                      RuntimeWarning, stacklevel=3)
    return np.where(clamped, 0.0, D), clamped, flagged


def _stable_roots(R1, R0, D):
    """Roots of ``y^2 - R1 y - R0 = 0`` without cancellation."""
    with np.errstate(invalid="ignore", divide="ignore"):
        sq = np.sqrt(np.where(D >= 0, D, np.nan))
        sgn = np.where(R1 >= 0, 1.0, -1.0)
        qv = 0.5 * (R1 + sgn * sq)
        big = qv
        small = np.where(qv != 0, -R0 / qv, 0.0)
    return np.minimum(big, small), np.maximum(big, small)


def coefficients_from_point(pt):
    """:class:`RiccatiCoefficients` at a ThermoPoint via the ratio formulas."""
    a2 = a2_closed(pt.p_tau, pt.p_tautau)
    if np.any(~(a2 > 0)):
        raise ValueError("a2 <= 0 at some state; (H1) fails there")
    R1, R0 = _ratios(pt)
    D, clamped, flagged = _clamp(R1**2 + 4.0 * R0, R1, R0)
    y_minus, y_plus = _stable_roots(R1, R0, D)
    return RiccatiCoefficients(R0 * a2, R1 * a2, a2, R1, R0, D, y_minus, y_plus, clamped, flagged)


def coefficients(law, profile, tau, x, model=None):
    """Riccati coefficients at ``(tau, x)``; builds a direct-evaluation model if none given."""
    model = model if model is not None else ThermoModel(law, profile)
    return coefficients_from_point(model.point(tau, x))


def roots(a0, a1, a2):
    """Both real roots ``(y_minus, y_plus)`` of ``a0 + a1 y - a2 y^2 = 0``.

    Raises
    ------
    ValueError
        If ``a2 <= 0`` or the discriminant is negative beyond the clamp window.
    """
    a0, a1, a2 = (np.asarray(v, dtype=float) for v in (a0, a1, a2))
    if np.any(~(a2 > 0)):
        raise ValueError("roots need a2 > 0")
    R1, R0 = a1 / a2, a0 / a2
    D, _, flagged = _clamp(R1**2 + 4.0 * R0, R1, R0)
    if np.any(flagged):
        raise ValueError(f"negative discriminant {float(np.min(D)):.3g}; no real roots")
    return _stable_roots(R1, R0, D)


def a2_chain_rule(law, tau, S=0.0, rel_step=1e-3):
    """a2 as c_h / (2 sqrt c), with c_h = c_tau / h_tau from Richardson differences.

    ``h`` is taken from quadrature so this path shares nothing with
    :func:`a2_closed` beyond ``p_tau``.
    """
    tau, S = np.broadcast_arrays(np.asarray(tau, dtype=float), np.asarray(S, dtype=float))
    d = rel_step * tau

    def c(t):
        return np.sqrt(-law.partials(t, S).p_tau)

    def h(t):
        return _h_quadrature(law, t, S)

    def rich(f):
        d1 = (f(tau + d) - f(tau - d)) / (2 * d)
        d2 = (f(tau + d / 2) - f(tau - d / 2)) / d
        return (4 * d2 - d1) / 3

    c_h = rich(c) / rich(h)
    return c_h / (2.0 * np.sqrt(c(tau)))


@dataclass
class ThresholdEstimate:
    """Root threshold N over a state box, plus envelope and growth constants once known."""

    N: float
    N_raw: float
    N_lower_root: float
    box: StateBox
    n: int
    witness: dict
    clamped_count: int = 0
    complex_count: int = 0
    Y: float | None = None
    Q: float | None = None
    k14: float | None = None
    k15: float | None = None
    k16: float | None = None
    k17: float | None = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "N": self.N, "N_raw": self.N_raw, "N_lower_root": self.N_lower_root,
            "safety_factor": SAFETY_FACTOR,
            "box": {"tau_min": self.box.tau_min, "tau_max": self.box.tau_max,
                    "x_min": self.box.x_min, "x_max": self.box.x_max},
            "samples_per_axis": self.n, "witness": self.witness,
            "clamped_discriminants": self.clamped_count,
            "complex_root_points": self.complex_count,
        }
        return out


def estimate_N(law, profile, box, n=64, model=None, tau_data=None, safety=SAFETY_FACTOR):
    """Threshold N = safety * sup of the larger root magnitude over the box.

    Parameters
    ----------
    tau_data : array_like, optional
        Initial specific volumes; the box must cover their range.
    """
    if tau_data is not None:
        lo, hi = float(np.min(tau_data)), float(np.max(tau_data))
        if lo < box.tau_min * (1 - 1e-12) or hi > box.tau_max * (1 + 1e-12):
            raise ValueError(f"box tau range [{box.tau_min:.6g}, {box.tau_max:.6g}] does not cover "
                             f"initial data range [{lo:.6g}, {hi:.6g}]")
    model = model if model is not None else ThermoModel(law, profile)
    T, X, S, dS = sample_box(box, n, profile)
    pt = model.point_S(T, S, dS, X)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rc = coefficients_from_point(pt)
    complex_pts = rc.flagged if getattr(model, "mu_convention", "fixed-tau") == "fixed-h" else None
    if complex_pts is None and np.any(rc.flagged):
        idx = np.unravel_index(np.argmax(rc.flagged), T.shape)
        raise ValueError(f"negative discriminant at tau={T[idx]:.6g}, x={X[idx]:.6g}: "
                         f"{float(rc.discriminant[idx]):.3g}")
    mag = np.maximum(np.abs(rc.y_minus), np.abs(rc.y_plus))
    lower = np.abs(rc.y_minus)
    if complex_pts is not None and np.any(complex_pts):
        # complex roots: the quadratic keeps one sign, and |y| >= (1 + eps) |root|
        # gives the same lower bound on it as in the real case
        modulus = np.sqrt(np.abs(rc.ratio_a0))
        mag = np.where(complex_pts, modulus, mag)
        lower = np.where(complex_pts, modulus, lower)
    idx = np.unravel_index(np.argmax(mag), mag.shape)
    raw = float(mag[idx])
    return ThresholdEstimate(
        N=safety * raw, N_raw=raw, N_lower_root=float(np.max(lower)),
        box=box, n=n, witness={"tau": float(T[idx]), "x": float(X[idx])},
        complex_count=0 if complex_pts is None else int(np.sum(complex_pts)),
        clamped_count=int(np.sum(rc.clamped)),
    )


def envelopes(N, y0, q0):
    """Y = max(N, sup y0), Q = max(N, sup q0)."""
    return max(float(N), float(np.max(y0))), max(float(N), float(np.max(q0)))


def quarter_integral(law, tau_lo, tau_hi, S):
    """Integral of (-p_tau)^(1/4) from tau_lo to tau_hi at entropy S."""
    val = law.quarter_integral_closed(tau_lo, tau_hi, S)
    if val is not None:
        return val
    tau_lo, tau_hi, S = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (tau_lo, tau_hi, S)))
    Sb = S[..., None]
    return finite_integral(lambda xi: (-law.partials(xi, Sb).p_tau) ** 0.25, tau_lo, tau_hi)


@dataclass
class A2Bound:
    k14: float
    k15: float
    k16: float
    k17: float
    A: float
    a2_inv_at_tau_min: float

    def bound(self, t):
        """Upper bound k14 t + k15 for 1/a2."""
        return self.k14 * np.asarray(t, dtype=float) + self.k15

    def quarter_bound(self, t):
        """Upper bound k16 t + k17 for the quarter-power integral."""
        return self.k16 * np.asarray(t, dtype=float) + self.k17

    def to_dict(self):
        return {k: float(getattr(self, k)) for k in
                ("k14", "k15", "k16", "k17", "A", "a2_inv_at_tau_min")}


def a2_growth_constants(law, tau_min, tau0, S0, Y, Q, A=None):
    """Constants of the linear-in-time bound on 1/a2.

    ``k16 = (Y+Q)/2``, ``k17 = sup_x`` of the quarter integral from
    ``tau_min`` to ``tau0(x)``, ``k14 = A k16`` and
    ``k15 = A k17 + sup_x 1/a2(tau_min, S(x))``.

    Parameters
    ----------
    tau0, S0 : array_like
        Initial specific volume and entropy on the grid.
    """
    A = float(law.constants.A if A is None else A)
    tau0 = np.asarray(tau0, dtype=float)
    S0 = np.broadcast_to(np.asarray(S0, dtype=float), tau0.shape)
    if np.any(tau0 < tau_min):
        raise ValueError("initial data reach below tau_min; the tau_min bound is inconsistent")
    k16 = 0.5 * (float(Y) + float(Q))
    k17 = float(np.max(quarter_integral(law, np.full(tau0.shape, tau_min), tau0, S0)))
    S_u = np.unique(S0)
    P = law.partials(np.full(S_u.shape, tau_min), S_u)
    a2_inv = float(np.max(1.0 / a2_closed(P.p_tau, P.p_tautau)))
    return A2Bound(A * k16, A * k17 + a2_inv, k16, k17, A, a2_inv)


def blowup_time_bound(y0, eps, k14, k15):
    """Latest possible blow-up time from ``y' <= -eps a2 y^2`` and ``1/a2 <= k14 t + k15``.

    Solves ``(eps/k14) log((k14 T + k15)/k15) = -1/y0``:
    ``T = (k15/k14) (exp(k14 / (eps |y0|)) - 1)``, tending to
    ``k15 / (eps |y0|)`` as ``k14 -> 0``.
    """
    y0 = float(y0)
    if not y0 < 0:
        raise ValueError(f"blow-up time bound needs y0 < 0, got {y0}")
    if not (eps > 0 and k15 > 0 and k14 >= 0):
        raise ValueError("need eps > 0, k15 > 0, k14 >= 0")
    z = k14 / (eps * abs(y0))
    if k14 == 0 or z < 1e-12:
        return k15 / (eps * abs(y0)) * (1.0 + 0.5 * z)
    if z > 700:
        return float("inf")
    return k15 / k14 * np.expm1(z)
