"""Pressure laws p(tau, S) with partial derivatives through third order.

Every law evaluates vectorized over numpy arrays and returns a
:class:`Partials` bundle. Builtin laws also expose closed forms for the
``h``, ``I`` and ``I_mu`` integrals; other laws return ``None`` there and the
thermo layer falls back to quadrature.
"""

from dataclasses import dataclass, fields

import numpy as np
import sympy

__all__ = [
    "Partials",
    "DeclaredConstants",
    "PressureLaw",
    "GammaLaw",
    "StiffenedGas",
    "ExpressionLaw",
    "law_from_config",
]


@dataclass
class Partials:
    """Pressure and its partials at one or more (tau, S) points."""

    p: np.ndarray
    p_tau: np.ndarray
    p_tautau: np.ndarray
    p_tau3: np.ndarray
    p_S: np.ndarray
    p_tauS: np.ndarray
    p_SS: np.ndarray
    p_tautauS: np.ndarray


@dataclass
class DeclaredConstants:
    """Candidate structural constants for hypotheses (H3) and (H4)."""

    k: float = 4.0
    A: float = 0.5
    k1: float = 0.5
    k2: float = 0.5
    l1: float = 1.0
    l2: float = 1.0
    l3: float = 0.5
    l4: float = 0.5
    l5: float = 1.0
    l6: float = 1.0
    l7: float = 0.5
    l8: float = 0.5

    def __post_init__(self):
        if not self.k > 1.0:
            raise ValueError(f"constant k must exceed 1, got {self.k}")
        for f in fields(self):
            if f.name != "k" and not getattr(self, f.name) > 0.0:
                raise ValueError(f"constant {f.name} must be positive, got {getattr(self, f.name)}")

    def to_dict(self):
        return {f.name: float(getattr(self, f.name)) for f in fields(self)}


class PressureLaw:
    """Base class for an equation of state ``p = p(tau, S)``.

    Subclasses implement :meth:`partials`. The scalar accessors below are
    conveniences built on it.
    """

    name = "abstract"
    c_v = 1.0

    def __init__(self, constants=None, S_range=(-np.inf, np.inf)):
        self.constants = constants if constants is not None else DeclaredConstants()
        self.S_range = tuple(S_range)

    def partials(self, tau, S):
        raise NotImplementedError

    def params(self):
        return {}

    def p(self, tau, S=0.0):
        return self.partials(tau, S).p

    def p_tau(self, tau, S=0.0):
        return self.partials(tau, S).p_tau

    def sound_speed(self, tau, S=0.0):
        """c = sqrt(-p_tau); raises ``ValueError`` where p_tau >= 0."""
        p_tau = np.asarray(self.partials(tau, S).p_tau)
        if np.any(~(p_tau < 0.0)):
            bad = np.flatnonzero(~(np.atleast_1d(p_tau) < 0.0))[0]
            t = np.broadcast_to(np.asarray(tau, dtype=float), np.shape(p_tau))
            raise ValueError(
                f"p_tau >= 0 at tau={np.atleast_1d(t)[bad]:.6g}; sound speed undefined"
            )
        return np.sqrt(-p_tau)

    # Closed forms are optional; None means "use quadrature".
    def h_closed(self, tau, S):
        return None

    def I_closed(self, tau, S, dS):
        return None

    def I_mu_closed(self, tau, S, dS):
        return None

    def fixed_h_closed(self, tau, S):
        """Closed-form ``(h_S, J, K)`` for the fixed-h entropy derivatives, or None."""
        return None

    def quarter_integral_closed(self, tau_lo, tau_hi, S):
        """Closed form of the integral of (-p_tau)**(1/4) from tau_lo to tau_hi."""
        return None

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class GammaLaw(PressureLaw):
    """Polytropic gas ``p = K exp(S / c_v) tau**(-gamma)``."""

    name = "gamma-law"

    def __init__(self, K=1.0, gamma=1.4, c_v=1.0, constants=None):
        if not (K > 0 and gamma > 1 and c_v > 0):
            raise ValueError("gamma-law needs K > 0, gamma > 1, c_v > 0")
        super().__init__(constants)
        self.K = float(K)
        self.gamma = float(gamma)
        self.c_v = float(c_v)

    def params(self):
        return {"K": self.K, "gamma": self.gamma, "c_v": self.c_v}

    def _base(self, tau, S):
        tau = np.asarray(tau, dtype=float)
        S = np.asarray(S, dtype=float)
        return self.K * np.exp(S / self.c_v) * tau ** (-self.gamma), tau

    def partials(self, tau, S=0.0):
        g, cv = self.gamma, self.c_v
        q, tau = self._base(tau, S)
        p_tau = -g * q / tau
        p_tautau = g * (g + 1.0) * q / tau**2
        p_tau3 = -g * (g + 1.0) * (g + 2.0) * q / tau**3
        return Partials(
            p=self._offset(q),
            p_tau=p_tau,
            p_tautau=p_tautau,
            p_tau3=p_tau3,
            p_S=q / cv,
            p_tauS=p_tau / cv,
            p_SS=q / cv**2,
            p_tautauS=p_tautau / cv,
        )

    def _offset(self, q):
        return q

    def h_closed(self, tau, S):
        g = self.gamma
        tau = np.asarray(tau, dtype=float)
        amp = np.sqrt(self.K * g * np.exp(np.asarray(S, dtype=float) / self.c_v))
        return 2.0 * amp / (g - 1.0) * tau ** (-(g - 1.0) / 2.0)

    def I_closed(self, tau, S, dS):
        # I = sigma * tau * (-p_tau)**(3/4) * (g - 1) / (g (3g - 1)), sigma = S'/c_v
        g = self.gamma
        q, tau = self._base(tau, S)
        sigma = np.asarray(dS, dtype=float) / self.c_v
        return sigma * tau * (g * q / tau) ** 0.75 * (g - 1.0) / (g * (3.0 * g - 1.0))

    def I_mu_closed(self, tau, S, dS):
        sigma = np.asarray(dS, dtype=float) / self.c_v
        return 0.75 * sigma * self.I_closed(tau, S, dS)

    def fixed_h_closed(self, tau, S):
        # with b = sqrt(K g e^(S/c_v)): h_S = h/(2 c_v),
        # J = -b^(3/2) tau^((1-3g)/4) / (c_v g (3g-1)), K = -J / (2 c_v (g-1))
        g, cv = self.gamma, self.c_v
        tau = np.asarray(tau, dtype=float)
        b = np.sqrt(self.K * g * np.exp(np.asarray(S, dtype=float) / cv))
        h_S = 0.5 * self.h_closed(tau, S) / cv
        J = -(b**1.5) * tau ** ((1.0 - 3.0 * g) / 4.0) / (cv * g * (3.0 * g - 1.0))
        return h_S, J, -J / (2.0 * cv * (g - 1.0))

    def quarter_integral_closed(self, tau_lo, tau_hi, S):
        g = self.gamma
        amp = (self.K * g * np.exp(np.asarray(S, dtype=float) / self.c_v)) ** 0.25
        e = 1.0 - (g + 1.0) / 4.0
        tau_lo = np.asarray(tau_lo, dtype=float)
        tau_hi = np.asarray(tau_hi, dtype=float)
        if abs(e) < 1e-14:
            return amp * np.log(tau_hi / tau_lo)
        return amp * (tau_hi**e - tau_lo**e) / e


class StiffenedGas(GammaLaw):
    """``p = K exp(S / c_v) tau**(-gamma) - p_inf``.

    Shares every tau- and S-derivative with the gamma-law, so ``h``, ``I`` and
    ``I_mu`` have the same closed forms; only ``p`` itself is shifted, which
    breaks the ``p -> 0`` limit of (H1) whenever ``p_inf != 0``.
    """

    name = "stiffened"

    def __init__(self, K=1.0, gamma=1.4, p_inf=0.0, c_v=1.0, constants=None):
        super().__init__(K, gamma, c_v, constants)
        self.p_inf = float(p_inf)

    def params(self):
        return {"K": self.K, "gamma": self.gamma, "p_inf": self.p_inf, "c_v": self.c_v}

    def _offset(self, q):
        return q - self.p_inf


class ExpressionLaw(PressureLaw):
    """Pressure law given as a sympy-parsable expression in ``tau`` and ``S``.

    All partials are derived symbolically and compiled with ``lambdify``.

    >>> law = ExpressionLaw("tau**-2")
    >>> float(law.partials(1.0, 0.0).p_tau)
    -2.0
    """

    name = "expression"

    def __init__(self, expr, c_v=1.0, constants=None, params=None):
        super().__init__(constants)
        self.expr_text = str(expr)
        self.c_v = float(c_v)
        self._params = dict(params or {})
        tau, S = sympy.symbols("tau S", positive=True)
        local = {"tau": tau, "S": S}
        local.update({k: sympy.Float(v) for k, v in self._params.items()})
        e = sympy.sympify(self.expr_text, locals=local)
        derivs = {
            "p": e,
            "p_tau": sympy.diff(e, tau),
            "p_tautau": sympy.diff(e, tau, 2),
            "p_tau3": sympy.diff(e, tau, 3),
            "p_S": sympy.diff(e, S),
            "p_tauS": sympy.diff(e, tau, S),
            "p_SS": sympy.diff(e, S, 2),
            "p_tautauS": sympy.diff(e, tau, 2, S),
        }
        self._funcs = {k: sympy.lambdify((tau, S), v, "numpy") for k, v in derivs.items()}

    def params(self):
        out = {"expr": self.expr_text, "c_v": self.c_v}
        out.update(self._params)
        return out

    def partials(self, tau, S=0.0):
        tau = np.asarray(tau, dtype=float)
        S = np.asarray(S, dtype=float)
        shape = np.broadcast_shapes(tau.shape, S.shape)
        vals = {}
        for k, fn in self._funcs.items():
            vals[k] = np.broadcast_to(np.asarray(fn(tau, S), dtype=float), shape).copy()
        return Partials(**vals)


_BUILTIN = {
    "gamma-law": GammaLaw,
    "stiffened": StiffenedGas,
}


def law_from_config(name, params, constants=None):
    """Instantiate a pressure law by name from a parameter mapping."""
    params = dict(params or {})
    if name in _BUILTIN:
        try:
            return _BUILTIN[name](constants=constants, **params)
        except TypeError as exc:
            raise ValueError(f"bad parameters for pressure law {name!r}: {exc}") from None
    if name == "expression":
        if "expr" not in params:
            raise ValueError("pressure law 'expression' needs key 'expr'")
        expr = params.pop("expr")
        c_v = params.pop("c_v", 1.0)
        return ExpressionLaw(expr, c_v=c_v, constants=constants, params=params)
    raise ValueError(f"unknown pressure law {name!r}; choose from {sorted(_BUILTIN) + ['expression']}")
