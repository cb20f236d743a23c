#!/usr/bin/env python3
"""Compare the numba and pure-numpy kernel implementations.

Runs each hot kernel on synthetic inputs of growing size and prints a
timing table plus the speedup. The numba variants are compiled (and
warmed) before timing. Run with ``DRADAPT_NO_NUMBA=1`` to confirm the
package itself falls back cleanly; this script always times both paths
directly and skips the numba column if numba is missing.

Usage: python benchmarks/bench_kernels.py [--sizes 500,1000,2000] [--repeats 3]
"""

import argparse
import time

import numpy as np

from dradapt import kernels


def _best_of(fn, repeats, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench(sizes, repeats, k=50, perplexity=30.0):
    rng = np.random.Generator(np.random.PCG64(7))
    rows = []
    for n in sizes:
        pts = rng.standard_normal((n, 32))
        cases = [("pairwise_dists", kernels.pairwise_dists_np,
                  kernels.pairwise_dists_nb, (pts,))]

        dm = kernels.pairwise_dists_np(pts)
        key = dm.copy()
        np.fill_diagonal(key, -np.inf)
        nn = np.ascontiguousarray(
            np.argsort(key, axis=1, kind="stable")[:, 1:min(k, n - 1) + 1])
        cases.append(("snn_matrix", kernels.snn_matrix_np,
                      kernels.snn_matrix_nb, (nn, n)))

        d2 = dm * dm
        cases.append(("gaussian_affinities", kernels.gaussian_affinities_np,
                      kernels.gaussian_affinities_nb, (d2, perplexity)))

        p = kernels.gaussian_affinities_np(d2, perplexity)
        p = (p + p.T) / (2.0 * n)
        y = rng.standard_normal((n, 2))
        cases.append(("tsne_grad", kernels.tsne_grad_np,
                      kernels.tsne_grad_nb, (y, p)))

        for name, np_fn, nb_fn, args in cases:
            t_np = _best_of(np_fn, repeats, *args)
            if nb_fn is not None:
                nb_fn(*args)  # warm the JIT
                t_nb = _best_of(nb_fn, repeats, *args)
                rows.append((name, n, t_np, t_nb, t_np / t_nb))
            else:
                rows.append((name, n, t_np, None, None))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="500,1000,2000")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if kernels.HAVE_NUMBA:
        print(f"numba available; package backend in use: "
              f"{'numba' if kernels.NUMBA_ENABLED else 'numpy (DRADAPT_NO_NUMBA)'}")
    else:
        print("numba not importable; timing numpy path only")
    print(f"{'kernel':<22}{'N':>6}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>9}")
    for name, n, t_np, t_nb, speedup in bench(sizes, args.repeats):
        nb = f"{t_nb:12.4f}" if t_nb is not None else f"{'-':>12}"
        sp = f"{speedup:8.1f}x" if speedup is not None else f"{'-':>9}"
        print(f"{name:<22}{n:>6}{t_np:>12.4f}{nb}{sp}")


if __name__ == "__main__":
    main()
