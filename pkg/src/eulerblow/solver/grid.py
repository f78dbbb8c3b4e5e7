"""Lagrangian grid, field state and derived fields."""

from dataclasses import dataclass, field

import numpy as np

from ..riccati import coefficients_from_point
from ..thermo import ThermoModel, gradient_pair, riemann_invariants

__all__ = ["Grid", "Physics", "FieldState", "centered_difference", "derived_fields"]


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred grid on ``[x_left, x_right]``."""

    x_left: float
    x_right: float
    n_cells: int
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_cells < 16:
            raise ValueError(f"n_cells must be at least 16, got {self.n_cells}")
        if not self.x_right > self.x_left:
            raise ValueError("x_right must exceed x_left")
        if self.boundary not in ("periodic", "outflow"):
            raise ValueError(f"boundary must be 'periodic' or 'outflow', got {self.boundary!r}")

    @property
    def dx(self):
        return (self.x_right - self.x_left) / self.n_cells

    @property
    def centers(self):
        return self.x_left + (np.arange(self.n_cells) + 0.5) * self.dx

    @property
    def faces(self):
        return self.x_left + np.arange(self.n_cells + 1) * self.dx

    @property
    def periodic(self):
        return self.boundary == "periodic"


class Physics:
    """Law, entropy profile and thermo model bound to a grid.

    Entropy is frozen in the Lagrangian frame, so ``S`` and ``S'`` at cell
    centres and faces are computed once.
    """

    def __init__(self, law, profile, grid, model=None):
        self.law = law
        self.profile = profile
        self.grid = grid
        self.model = model if model is not None else ThermoModel(law, profile)
        xc, xf = grid.centers, grid.faces
        self.S_cell = np.asarray(profile.S(xc), dtype=float) * np.ones_like(xc)
        self.dS_cell = np.asarray(profile.dS(xc), dtype=float) * np.ones_like(xc)
        self.d2S_cell = np.asarray(profile.d2S(xc), dtype=float) * np.ones_like(xc)
        self.S_face = np.asarray(profile.S(xf), dtype=float) * np.ones_like(xf)


def centered_difference(f, dx, periodic):
    """Second-order centred derivative; one-sided second order at outflow edges."""
    f = np.asarray(f, dtype=float)
    if periodic:
        return (np.roll(f, -1, axis=-1) - np.roll(f, 1, axis=-1)) / (2.0 * dx)
    return np.gradient(f, dx, axis=-1, edge_order=2)


@dataclass
class FieldState:
    """Cell values of (tau, u) at time ``t`` with derived fields filled by :func:`derived_fields`."""

    t: float
    tau: np.ndarray
    u: np.ndarray
    derived: dict = field(default_factory=dict)

    def __getattr__(self, name):
        d = self.__dict__.get("derived", {})
        if name in d:
            return d[name]
        raise AttributeError(name)


def derived_fields(tau, u, physics):
    """c, p, h, s, r, y, q and the Riccati coefficients on the grid.

    Works on a single level (shape ``(n,)``) or a stack of levels
    (shape ``(m, n)``).
    """
    tau = np.asarray(tau, dtype=float)
    u = np.asarray(u, dtype=float)
    S = np.broadcast_to(physics.S_cell, tau.shape)
    dS = np.broadcast_to(physics.dS_cell, tau.shape)
    d2S = np.broadcast_to(physics.d2S_cell, tau.shape)
    pt = physics.model.point_S(tau, S, dS, d2S=d2S)
    s, r = riemann_invariants(u, pt.h)
    g = physics.grid
    gp = gradient_pair(centered_difference(s, g.dx, g.periodic),
                       centered_difference(r, g.dx, g.periodic), pt.c, pt.p_mu, pt.I)
    rc = coefficients_from_point(pt)
    return {
        "c": pt.c, "p": pt.p, "h": pt.h, "s": s, "r": r, "y": gp.y, "q": gp.q,
        "I": pt.I, "p_mu": pt.p_mu, "a0": rc.a0, "a1": rc.a1, "a2": rc.a2,
    }
