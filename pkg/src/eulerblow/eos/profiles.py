"""Entropy profiles S(x) frozen in the Lagrangian frame, and the weight m(S)."""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from ..quadrature import _W20, _X20

__all__ = [
    "Segment",
    "EntropyProfile",
    "ConstantEntropy",
    "TanhEntropy",
    "SineBumpEntropy",
    "SmoothedPiecewiseLinearEntropy",
    "profile_from_config",
]


@dataclass(frozen=True)
class Segment:
    """Maximal interval on which S' keeps one sign (+1, -1, or 0)."""

    left: float
    right: float
    sign: int


class EntropyProfile:
    """C^1 entropy profile with weight ``m = m(S)``.

    The default weight is ``m = exp(S / (2 c_v))`` so that
    ``m'/m = S' / (2 c_v)``. Pass ``m_of_S`` and ``dlogm_dS`` to override.
    """

    name = "abstract"

    def __init__(self, c_v=1.0, m_of_S=None, dlogm_dS=None):
        if not c_v > 0:
            raise ValueError("c_v must be positive")
        self.c_v = float(c_v)
        if (m_of_S is None) != (dlogm_dS is None):
            raise ValueError("override m_of_S and dlogm_dS together")
        self._m_of_S = m_of_S
        self._dlogm_dS = dlogm_dS

    def S(self, x):
        raise NotImplementedError

    def dS(self, x):
        raise NotImplementedError

    def d2S(self, x, rel_step=1e-5):
        """S''(x); the default is a centred difference of :meth:`dS`."""
        x = np.asarray(x, dtype=float)
        d = rel_step * np.maximum(1.0, np.abs(x))
        return (self.dS(x + d) - self.dS(x - d)) / (2.0 * d)

    def params(self):
        return {}

    @property
    def isentropic(self):
        return False

    def m(self, x):
        S = self.S(x)
        if self._m_of_S is not None:
            return self._m_of_S(S)
        return np.exp(S / (2.0 * self.c_v))

    def dlogm(self, x):
        """m'(x) / m(x)."""
        if self._dlogm_dS is not None:
            return self._dlogm_dS(self.S(x)) * self.dS(x)
        return self.dS(x) / (2.0 * self.c_v)

    def monotone_segments(self, x_left, x_right, n_samples=4097, zero_tol=1e-13):
        """Split ``[x_left, x_right]`` into maximal intervals where S' keeps its sign.

        Sign changes are located on a uniform sample grid and refined with
        Brent's method. Intervals where ``|S'|`` stays below ``zero_tol``
        times its maximum are reported with sign 0.
        """
        x = np.linspace(x_left, x_right, n_samples)
        d = np.asarray(self.dS(x), dtype=float) * np.ones_like(x)
        scale = np.max(np.abs(d))
        if scale == 0.0:
            return [Segment(float(x_left), float(x_right), 0)]
        sgn = np.where(np.abs(d) <= zero_tol * scale, 0, np.sign(d)).astype(int)
        segments = []
        start = float(x_left)
        for i in range(1, n_samples):
            if sgn[i] == sgn[i - 1]:
                continue
            a, b = x[i - 1], x[i]
            if sgn[i - 1] != 0 and sgn[i] != 0:
                edge = optimize.brentq(self.dS, a, b, xtol=1e-15)
            else:
                edge = a if sgn[i - 1] != 0 else b
                edge = float(edge)
            segments.append(Segment(start, float(edge), int(sgn[i - 1])))
            start = float(edge)
        segments.append(Segment(start, float(x_right), int(sgn[-1])))
        return [s for s in segments if s.right > s.left]

    def total_variation(self, x_left, x_right, n_panels=16):
        """V = integral of |m'/m| over the interval, by composite Gauss-Legendre.

        Panels are aligned with the monotone segments so the integrand is
        smooth on each one.
        """
        total = 0.0
        for seg in self.monotone_segments(x_left, x_right):
            if seg.sign == 0:
                continue
            edges = np.linspace(seg.left, seg.right, n_panels + 1)
            lo, hi = edges[:-1], edges[1:]
            half = 0.5 * (hi - lo)
            xi = (0.5 * (hi + lo))[:, None] + half[:, None] * _X20
            vals = np.abs(self.dlogm(xi))
            total += float(np.sum(half * np.sum(_W20 * vals, axis=1)))
        return total

    def total_variation_increments(self, x_left, x_right):
        """V as the sum of |log m| increments over monotone segments."""
        total = 0.0
        for seg in self.monotone_segments(x_left, x_right):
            if seg.sign == 0:
                continue
            total += abs(float(np.log(self.m(seg.right)) - np.log(self.m(seg.left))))
        return total

    def total_variation_adaptive(self, x_left, x_right):
        """V via scipy's adaptive quadrature; kept as an independent cross-check."""
        segs = self.monotone_segments(x_left, x_right)
        total = 0.0
        for seg in segs:
            if seg.sign == 0:
                continue
            val, _ = integrate.quad(lambda z: abs(float(self.dlogm(z))), seg.left, seg.right,
                                    epsabs=0.0, epsrel=1e-13, limit=200)
            total += val
        return total

    def m_bounds(self, x_left, x_right, n_samples=4097):
        """(k_ml, k_mr): the range of m over the interval, from dense sampling."""
        x = np.linspace(x_left, x_right, n_samples)
        ends = [s.left for s in self.monotone_segments(x_left, x_right)] + [x_right]
        m = np.concatenate([np.atleast_1d(self.m(x)), np.atleast_1d(self.m(np.array(ends)))])
        return float(np.min(m)), float(np.max(m))

    def S_range(self, x_left, x_right, n_samples=4097):
        x = np.linspace(x_left, x_right, n_samples)
        S = np.asarray(self.S(x), dtype=float) * np.ones_like(x)
        return float(np.min(S)), float(np.max(S))

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


class ConstantEntropy(EntropyProfile):
    name = "constant"

    def __init__(self, value=0.0, c_v=1.0, **kw):
        super().__init__(c_v, **kw)
        self.value = float(value)

    @property
    def isentropic(self):
        return True

    def params(self):
        return {"value": self.value}

    def S(self, x):
        return np.full(np.shape(x), self.value)

    def dS(self, x):
        return np.zeros(np.shape(x))

    def d2S(self, x):
        return np.zeros(np.shape(x))


class TanhEntropy(EntropyProfile):
    """``S = base + amplitude * tanh((x - center) / width)``."""

    name = "tanh"

    def __init__(self, amplitude=1.0, center=0.0, width=1.0, base=0.0, c_v=1.0, **kw):
        super().__init__(c_v, **kw)
        if not width > 0:
            raise ValueError("tanh profile needs width > 0")
        self.amplitude = float(amplitude)
        self.center = float(center)
        self.width = float(width)
        self.base = float(base)

    def params(self):
        return {"amplitude": self.amplitude, "center": self.center, "width": self.width, "base": self.base}

    def S(self, x):
        return self.base + self.amplitude * np.tanh((np.asarray(x, dtype=float) - self.center) / self.width)

    def dS(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return self.amplitude / self.width / np.cosh(z) ** 2

    def d2S(self, x):
        z = (np.asarray(x, dtype=float) - self.center) / self.width
        return -2.0 * self.amplitude / self.width**2 * np.tanh(z) / np.cosh(z) ** 2


class SineBumpEntropy(EntropyProfile):
    """``S = amplitude * sin(2 pi x / period) * cos^2(pi x / window)`` on ``|x| < window/2``.

    Zero outside the window; the cosine-squared taper makes it C^1.
    """

    name = "sine-bump"

    def __init__(self, amplitude=0.1, period=2.0, window=4.0, c_v=1.0, **kw):
        super().__init__(c_v, **kw)
        if not (period > 0 and window > 0):
            raise ValueError("sine-bump needs period > 0 and window > 0")
        self.amplitude = float(amplitude)
        self.period = float(period)
        self.window = float(window)

    def params(self):
        return {"amplitude": self.amplitude, "period": self.period, "window": self.window}

    def S(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 0.5 * self.window
        val = self.amplitude * np.sin(2 * np.pi * x / self.period) * np.cos(np.pi * x / self.window) ** 2
        return np.where(inside, val, 0.0)

    def dS(self, x):
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 0.5 * self.window
        k, w = 2 * np.pi / self.period, np.pi / self.window
        val = self.amplitude * (
            k * np.cos(k * x) * np.cos(w * x) ** 2 - w * np.sin(k * x) * np.sin(2 * w * x)
        )
        return np.where(inside, val, 0.0)

    def d2S(self, x):
        # one-sided at the window edges, where S'' jumps
        x = np.asarray(x, dtype=float)
        inside = np.abs(x) < 0.5 * self.window
        k, w = 2 * np.pi / self.period, np.pi / self.window
        val = self.amplitude * (
            -(k * k + 2 * w * w) * np.sin(k * x) * np.cos(w * x) ** 2
            + 2 * w * w * np.sin(k * x) * np.sin(w * x) ** 2
            - 2 * k * w * np.cos(k * x) * np.sin(2 * w * x)
        )
        return np.where(inside, val, 0.0)


class SmoothedPiecewiseLinearEntropy(EntropyProfile):
    """Piecewise-linear interpolant of ``knots`` with softplus-rounded corners.

    Flat (zero slope) outside the knot range. ``smoothing`` is the corner
    radius in x. Knots are ``[[x0, S0], [x1, S1], ...]`` with increasing x.
    """

    name = "piecewise-linear-smoothed"

    def __init__(self, knots, smoothing=0.1, c_v=1.0, **kw):
        super().__init__(c_v, **kw)
        knots = np.asarray(knots, dtype=float)
        if knots.ndim != 2 or knots.shape[1] != 2 or knots.shape[0] < 2:
            raise ValueError("knots must be a list of at least two [x, S] pairs")
        if np.any(np.diff(knots[:, 0]) <= 0):
            raise ValueError("knot x-coordinates must increase")
        if not smoothing > 0:
            raise ValueError("smoothing must be positive")
        self.knots = knots
        self.smoothing = float(smoothing)
        slopes = np.diff(knots[:, 1]) / np.diff(knots[:, 0])
        full = np.concatenate([[0.0], slopes, [0.0]])
        self._jumps = np.diff(full)
        self._S0 = knots[0, 1]

    def params(self):
        return {"knots": self.knots.tolist(), "smoothing": self.smoothing}

    def S(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        z = (x - self.knots[:, 0]) / self.smoothing
        ramp = self.smoothing * np.logaddexp(0.0, z)
        return self._S0 + np.sum(self._jumps * ramp, axis=-1)

    def dS(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        z = (x - self.knots[:, 0]) / self.smoothing
        sig = 0.5 * (1.0 + np.tanh(0.5 * z))
        return np.sum(self._jumps * sig, axis=-1)

    def d2S(self, x):
        x = np.asarray(x, dtype=float)[..., None]
        z = (x - self.knots[:, 0]) / self.smoothing
        return np.sum(self._jumps * 0.25 / np.cosh(0.5 * z) ** 2, axis=-1) / self.smoothing


_PROFILES = {
    "constant": ConstantEntropy,
    "tanh": TanhEntropy,
    "sine-bump": SineBumpEntropy,
    "piecewise-linear-smoothed": SmoothedPiecewiseLinearEntropy,
}


def profile_from_config(name, params, c_v=1.0):
    """Instantiate an entropy profile by name from a parameter mapping."""
    if name not in _PROFILES:
        raise ValueError(f"unknown entropy profile {name!r}; choose from {sorted(_PROFILES)}")
    try:
        return _PROFILES[name](c_v=c_v, **dict(params or {}))
    except TypeError as exc:
        raise ValueError(f"bad parameters for entropy profile {name!r}: {exc}") from None
