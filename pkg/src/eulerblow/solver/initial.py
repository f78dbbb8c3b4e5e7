"""Initial-data families on a Lagrangian grid."""

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = ["FAMILIES", "initial_data"]


def _sech2(z):
    return 1.0 / np.cosh(z) ** 2


def sech2_pulse(x, amplitude=1.0, width=1.0, center=0.0, tau=1.0, u=0.0, tau_amplitude=0.0):
    """``u = u_bg - amplitude sech^2((x - center)/width)``, ``tau = tau_bg (1 + tau_amplitude sech^2)``."""
    if not width > 0:
        raise ValueError("sech2-pulse needs width > 0")
    z = _sech2((x - center) / width)
    return tau * (1.0 + tau_amplitude * z), u - amplitude * z


def sine(x, amplitude=0.1, wavelength=1.0, tau=1.0, u=0.0, phase=0.0):
    """``u = u_bg + amplitude sin(2 pi x / wavelength + phase)`` on a uniform tau background."""
    if not wavelength > 0:
        raise ValueError("sine needs wavelength > 0")
    return np.full_like(x, float(tau)), u + amplitude * np.sin(2 * np.pi * x / wavelength + phase)


def riemann_smooth(x, left=None, right=None, transition_width=1.0, center=0.0):
    """tanh-smoothed Riemann data between states ``{tau, u}`` on each side."""
    left = {"tau": 1.0, "u": 0.0, **(left or {})}
    right = {"tau": 1.0, "u": 0.0, **(right or {})}
    if not transition_width > 0:
        raise ValueError("riemann-smooth needs transition_width > 0")
    w = 0.5 * (1.0 + np.tanh((x - center) / transition_width))
    return left["tau"] + (right["tau"] - left["tau"]) * w, left["u"] + (right["u"] - left["u"]) * w


def custom_table(x, file):
    """Cubic-spline interpolation of a CSV table with header ``x,tau,u``."""
    data = np.genfromtxt(file, delimiter=",", names=True)
    for col in ("x", "tau", "u"):
        if col not in data.dtype.names:
            raise ValueError(f"custom table {file!r} lacks column {col!r}")
    if x.min() < data["x"].min() or x.max() > data["x"].max():
        raise ValueError(f"custom table {file!r} does not cover the grid")
    return CubicSpline(data["x"], data["tau"])(x), CubicSpline(data["x"], data["u"])(x)


FAMILIES = {
    "sech2-pulse": sech2_pulse,
    "sine": sine,
    "riemann-smooth": riemann_smooth,
    "custom-table": custom_table,
}


def initial_data(family, params, grid):
    """Cell values ``(tau0, u0)`` of a named family on ``grid``."""
    if family not in FAMILIES:
        raise ValueError(f"unknown initial-data family {family!r}; choose from {sorted(FAMILIES)}")
    params = {k.replace("-", "_"): v for k, v in dict(params or {}).items()}
    try:
        tau, u = FAMILIES[family](grid.centers, **params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for initial data {family!r}: {exc}") from None
    tau = np.asarray(tau, dtype=float) * np.ones(grid.n_cells)
    u = np.asarray(u, dtype=float) * np.ones(grid.n_cells)
    if np.any(~(tau > 0)):
        raise ValueError("initial specific volume must be positive")
    return tau, u
