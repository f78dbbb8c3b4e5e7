"""Vectorized Gauss-Legendre quadrature on geometric panels.

All integrands in this package are smooth on ``(0, inf)`` and behave like
power laws near both ends, so panels whose endpoints differ by a factor of
two resolve them to round-off with 20 nodes. Panels are bisected when the
20- and 10-node rules disagree.

Integrands are callables ``f(xi)`` where ``xi`` has shape ``batch + (n,)``
and the batch shape is that of the integration limits.
"""

import numpy as np

__all__ = [
    "DivergenceError",
    "panel_integral",
    "finite_integral",
    "tail_integral",
]

_X20, _W20 = np.polynomial.legendre.leggauss(20)
_X10, _W10 = np.polynomial.legendre.leggauss(10)


class DivergenceError(ArithmeticError):
    """An improper integral failed to converge within the doubling cap."""


def _gauss(f, lo, hi, nodes, weights):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xi = mid[..., None] + half[..., None] * nodes
    return half * np.sum(weights * f(xi), axis=-1)


def panel_integral(f, lo, hi, rtol=1e-13, depth=8):
    """Integrate ``f`` over ``[lo, hi]`` elementwise, bisecting on disagreement."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    fine = _gauss(f, lo, hi, _X20, _W20)
    if depth == 0:
        return fine
    coarse = _gauss(f, lo, hi, _X10, _W10)
    scale = np.maximum(np.abs(fine), 1e-300)
    with np.errstate(invalid="ignore"):
        bad = np.abs(fine - coarse) > rtol * scale + 1e-300
    if not np.any(bad):
        return fine
    mid = 0.5 * (lo + hi)
    return panel_integral(f, lo, mid, rtol, depth - 1) + panel_integral(f, mid, hi, rtol, depth - 1)


def finite_integral(f, a, b, rtol=1e-13):
    """Integral of ``f`` from ``a`` to ``b`` (both positive), vectorized.

    The interval is cut into log-uniform panels whose endpoint ratio is at
    most two. ``b < a`` returns the negated integral.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("finite_integral needs positive limits")
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    sign = np.where(b >= a, 1.0, -1.0)
    ratio = np.max(np.log2(hi / lo)) if lo.size else 0.0
    n_panels = max(1, int(np.ceil(ratio)))
    edges = lo[..., None] * (hi / lo)[..., None] ** (np.arange(n_panels + 1) / n_panels)
    total = np.zeros(lo.shape)
    for k in range(n_panels):
        total = total + panel_integral(f, edges[..., k], edges[..., k + 1], rtol)
    return sign * total


def tail_integral(f, a, rtol=1e-12, max_doublings=1000):
    """Integral of ``f`` from ``a`` to infinity over doubling panels.

    After each panel the ratio of successive panel increments is examined.
    Once it settles below one the remainder is summed as a geometric series
    (exact for pure power-law tails); otherwise doubling continues until the
    increment drops below ``rtol`` relative to the running total.

    Raises
    ------
    DivergenceError
        If some element has not converged after ``max_doublings`` panels.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("tail_integral needs a positive lower limit")
    if a.ndim == 0:
        return tail_integral(f, a[None], rtol, max_doublings)[0]
    total = np.zeros(a.shape)
    active = np.ones(a.shape, dtype=bool)
    lo = a.copy()
    prev_inc = np.full(a.shape, np.nan)
    prev_ratio = np.full(a.shape, np.nan)
    growing = np.zeros(a.shape, dtype=int)
    for _ in range(max_doublings):
        inc = panel_integral(f, lo, 2.0 * lo, rtol * 1e-1)
        inc = np.where(active, inc, 0.0)
        total = total + inc
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = inc / prev_inc
        small = np.abs(inc) <= rtol * np.abs(total)
        settled = (
            (ratio >= 0.0)
            & (ratio < 0.999)
            & (np.abs(ratio - prev_ratio) <= 1e-9 * np.maximum(1.0, np.abs(ratio)))
        )
        geometric = active & settled & ~small
        if np.any(geometric):
            r = ratio[geometric]
            total[geometric] += inc[geometric] * r / (1.0 - r)
        active = active & ~(small | settled)
        if not np.any(active):
            return total
        growing = np.where(active & (ratio >= 1.0 - 1e-12), growing + 1, 0)
        if np.any(growing > 64):
            raise DivergenceError("tail increments are not decaying; integral diverges")
        if np.any(~np.isfinite(total[active])):
            raise DivergenceError("non-finite integrand in tail integral")
        prev_inc = inc
        prev_ratio = ratio
        lo = 2.0 * lo
    raise DivergenceError(
        f"tail integral not converged after {max_doublings} doublings "
        f"(last lower limit {float(np.max(lo)):.3g})"
    )
