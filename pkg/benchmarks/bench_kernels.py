#!/usr/bin/env python3
"""Time the energy-minimizer kernels under both backends.

Numba is warmed up first so compilation is excluded. Prints one line per
(kernel, size) plus full numerical_capacity solves, and the numba speedup.

    python benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 20]
"""

import argparse
import time

import numpy as np

from pcap import capacity
from pcap._kernels import get_kernels
from pcap.geometry import ModelSpace, make_profile


def best_of(func, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - t0)
    return best


def problem(N, p):
    space = ModelSpace(make_profile("hyperbolic"), 2, p)
    grid, h, w, _ = capacity.discrete_problem(space, 1.0, 5.0, N)
    v = (grid[-1] - grid) / (grid[-1] - grid[0])
    return v, h, w / w.sum()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--p", type=float, default=3.0)
    args = ap.parse_args()

    backends = {"numpy": get_kernels("numpy"), "numba": get_kernels("numba")}
    v, h, w = problem(64, args.p)
    for k in backends.values():        # warm up / compile
        g, d, o = k.gradient_hessian(v, h, w, args.p, 1e-10)
        k.solve_tridiagonal(d, o, g)
        k.energy(v, h, w, args.p, 1e-10)

    print(f"{'kernel':<20s}{'N':>9s}{'numpy [ms]':>13s}{'numba [ms]':>13s}{'speedup':>9s}")
    for N in args.sizes:
        v, h, w = problem(N, args.p)
        g, d, o = backends["numpy"].gradient_hessian(v, h, w, args.p, 1e-10)
        cases = {
            "energy": lambda k: k.energy(v, h, w, args.p, 1e-10),
            "gradient_hessian": lambda k: k.gradient_hessian(v, h, w, args.p, 1e-10),
            "solve_tridiagonal": lambda k: k.solve_tridiagonal(d, o, g),
        }
        for name, call in cases.items():
            t = {b: best_of(lambda: call(k), args.repeat) for b, k in backends.items()}
            print(f"{name:<20s}{N:>9d}{1e3 * t['numpy']:>13.4f}{1e3 * t['numba']:>13.4f}"
                  f"{t['numpy'] / t['numba']:>9.2f}")

    space = ModelSpace(make_profile("hyperbolic"), 2, args.p)
    for N in args.sizes[:2]:
        opts = capacity.MeshOptions(N=N)
        t = {
            b: best_of(lambda: capacity.numerical_capacity(space, 1.0, 5.0, opts, kernels=k),
                       max(1, args.repeat // 5))
            for b, k in backends.items()
        }
        print(f"{'numerical_capacity':<20s}{N:>9d}{1e3 * t['numpy']:>13.4f}{1e3 * t['numba']:>13.4f}"
              f"{t['numpy'] / t['numba']:>9.2f}")


if __name__ == "__main__":
    main()
