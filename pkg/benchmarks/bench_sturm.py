"""Timing of the Sturm bisection kernel: compiled extension vs numpy fallback.

Runs the lowest ``k`` eigenvalues of the flat Dirichlet Laplacian on ``N``
interior points (exact discrete values 4 sin^2(jh/2)/h^2) with every
importable backend and prints one line per (backend, N).

    python3 benchmarks/bench_sturm.py [--sizes 1024 4096 8192] [--levels 4] [--repeat 3]
"""
import argparse
import time

import numpy as np

from pdmsusy.sturm import BACKENDS


def laplacian(n):
    h = np.pi / (n + 1)
    return np.full(n, 2.0 / h**2), np.full(n - 1, -1.0 / h**2)


def run(impl, d, e, k):
    e2 = e**2
    hi = 4.0 * float(d[0])
    eps = np.finfo(float).eps
    return impl.bisect_eigenvalues(d, e2, 0, k, 0.0, hi, 1e-15, 4 * eps * hi, eps * hi)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1024, 4096, 8192])
    ap.add_argument("--levels", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    print(f"{'backend':8s} {'N':>6s} {'best [ms]':>10s} {'max |E - exact|':>14s}")
    for n in args.sizes:
        d, e = laplacian(n)
        h = np.pi / (n + 1)
        j = np.arange(1, args.levels + 1)
        exact = (2 - 2 * np.cos(j * h)) / h**2
        for name, impl in BACKENDS.items():
            best = np.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                vals = np.asarray(run(impl, d, e, args.levels))
                best = min(best, time.perf_counter() - t0)
            print(f"{name:8s} {n:6d} {1e3 * best:10.2f} {np.max(np.abs(vals - exact)):14.2e}")


if __name__ == "__main__":
    main()
