"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--repeats 50]

Times the two hot kernels (barycenter gradient quadrature sum, power-mean
fixed-point step) on a grid of problem sizes, plus one end-to-end barycenter
solve.  The numba path is compiled before timing.  Run with
QHMEANS_DISABLE_NUMBA=1 to confirm the fallback selection logic.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qhmeans import _accel
from qhmeans._accel import grad_quad_sum_numpy, power_mean_step_numpy


def random_pd(rng, dim):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, _ = np.linalg.qr(g)
    eigs = np.exp(rng.uniform(-1, 1, size=dim))
    return (q * eigs) @ q.conj().T


def chebyshev(order):
    k = np.arange(1, order + 1)
    return (1 + np.cos((2 * k - 1) * np.pi / (2 * order))) / 2, np.full(order, 1 / order)


def timeit(fn, repeats):
    fn()  # warm up (and JIT-compile on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_kernels(repeats):
    rng = np.random.default_rng(0)
    rows = []
    for dim, m, order in ((2, 2, 64), (4, 4, 64), (8, 4, 128), (16, 8, 128)):
        X = np.ascontiguousarray(random_pd(rng, dim).astype(np.complex128))
        mats = np.ascontiguousarray(
            np.stack([random_pd(rng, dim) for _ in range(m)]).astype(np.complex128)
        )
        inv_mats = np.ascontiguousarray(np.linalg.inv(mats))
        weights = rng.dirichlet(np.ones(m))
        nodes, qw = chebyshev(order)

        t_np = timeit(lambda: grad_quad_sum_numpy(X, inv_mats, weights, nodes, qw), repeats)
        row = {"kernel": "grad_quad_sum", "dim": dim, "m": m, "order": order, "numpy": t_np}
        if _accel.grad_quad_sum_numba is not None:
            row["numba"] = timeit(
                lambda: _accel.grad_quad_sum_numba(X, inv_mats, weights, nodes, qw),
                repeats,
            )
        rows.append(row)

        t_np = timeit(lambda: power_mean_step_numpy(X, mats, weights, 0.5), repeats)
        row = {"kernel": "power_mean_step", "dim": dim, "m": m, "order": "-", "numpy": t_np}
        if _accel.power_mean_step_numba is not None:
            row["numba"] = timeit(
                lambda: _accel.power_mean_step_numba(X, mats, weights, 0.5), repeats
            )
        rows.append(row)
    return rows


def bench_end_to_end():
    from qhmeans import DivergenceSpec, SolverOptions, arcsine_generator, ensemble, solve_barycenter

    A1 = np.diag([4.0, 1.0])
    A2 = 0.5 * np.array([[5.0, 3.0], [3.0, 5.0]])
    ens = ensemble([A1, A2], [0.5, 0.5])
    spec = DivergenceSpec(arcsine_generator())
    solve_barycenter(ens, spec, SolverOptions(max_iterations=3))  # warm up
    t0 = time.perf_counter()
    rep = solve_barycenter(ens, spec)
    return time.perf_counter() - t0, rep.iterations


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=50)
    args = parser.parse_args()

    print(f"active backend: {_accel.BACKEND}")
    print(f"{'kernel':<16} {'dim':>4} {'m':>3} {'order':>6} {'numpy':>12} {'numba':>12} {'speedup':>8}")
    for row in bench_kernels(args.repeats):
        np_t = row["numpy"]
        if "numba" in row:
            nb_t = row["numba"]
            speedup = f"{np_t / nb_t:6.1f}x"
            nb_s = f"{nb_t * 1e6:10.1f}us"
        else:
            speedup, nb_s = "-", "-"
        print(
            f"{row['kernel']:<16} {row['dim']:>4} {row['m']:>3} {str(row['order']):>6} "
            f"{np_t * 1e6:10.1f}us {nb_s:>12} {speedup:>8}"
        )

    elapsed, iterations = bench_end_to_end()
    print(f"\nreference 2x2 barycenter ({_accel.BACKEND} backend): "
          f"{elapsed * 1e3:.1f} ms, {iterations} iterations")


if __name__ == "__main__":
    main()
