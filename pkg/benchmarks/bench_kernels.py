"""Compare the compiled and pure-Python kernel backends.

Usage::

    python3 benchmarks/bench_kernels.py [--cells 1024] [--repeat 5]

Prints the best-of-``repeat`` wall time per call for each kernel and the
speed-up of the compiled backend, after checking both give the same result.
"""

import argparse
import timeit

import numpy as np

from eulerblow.kernels import get_backend


def _inputs(n, rng):
    v = 1.0 + 0.1 * rng.standard_normal(n + 4)
    tl, tr = 1.0 + 0.1 * rng.random(n + 1), 1.0 + 0.1 * rng.random(n + 1)
    ul, ur = rng.standard_normal(n + 1), rng.standard_normal(n + 1)
    pl, pr = tl**-2, tr**-2
    cl, cr = np.sqrt(2 * tl**-3), np.sqrt(2 * tr**-3)
    return v, (tl, tr, ul, ur, pl, pr, cl, cr, 1.0 / n)


def _trace_args(n, levels):
    times = np.linspace(0.0, 1.0, levels)
    shape = (levels, n)
    c = np.full(shape, 1.0)
    a0 = np.zeros(shape)
    a1 = np.zeros(shape)
    a2 = np.full(shape, 0.5)
    # constant coefficients: y' = -a2 y^2 from y0 = -2 blows up at t = 1
    return (times, -5.0, 10.0 / n, 0, c, a0, a1, a2, 0.0, 0.0, 2.0, -2.0, 1, 1e-4, 16.0, 40000)


def bench(n_cells=1024, repeat=5, levels=200):
    rng = np.random.default_rng(0)
    v, flux_args = _inputs(n_cells, rng)
    targs = _trace_args(n_cells, levels)
    py, cy = get_backend("python"), get_backend("cython")

    for a, b in zip(py.minmod_reconstruct(v), cy.minmod_reconstruct(v)):
        np.testing.assert_allclose(a, b, rtol=0, atol=0)
    for a, b in zip(py.llf_divergence(*flux_args), cy.llf_divergence(*flux_args)):
        np.testing.assert_allclose(a, b, rtol=1e-15, atol=1e-15)
    tp, tc = py.trace_path(*targs)[4], cy.trace_path(*targs)[4]
    assert abs(tp - tc) < 1e-12, (tp, tc)

    cases = {
        "minmod_reconstruct": lambda m: m.minmod_reconstruct(v),
        "llf_divergence": lambda m: m.llf_divergence(*flux_args),
        "trace_path": lambda m: m.trace_path(*targs),
    }
    rows = []
    for name, fn in cases.items():
        number = 1 if name == "trace_path" else 200
        t_py = min(timeit.repeat(lambda: fn(py), number=number, repeat=repeat)) / number
        t_cy = min(timeit.repeat(lambda: fn(cy), number=number, repeat=repeat)) / number
        rows.append((name, t_py, t_cy, t_py / t_cy))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':22s} {'python [s]':>12s} {'cython [s]':>12s} {'speed-up':>9s}")
    for name, t_py, t_cy, ratio in bench(args.cells, args.repeat):
        print(f"{name:22s} {t_py:12.3e} {t_cy:12.3e} {ratio:9.1f}")


if __name__ == "__main__":
    main()
