#!/usr/bin/env python3
"""Compare the numba and pure-numpy backends of the L1 stepping loop.

The recurrence is the package's only hot loop: the history term costs O(n)
per step and the verification suites run it at n = 1e5.  Usage::

    python benchmarks/bench_backends.py [--steps 100000] [--repeats 3]

The numpy path is always measured; the numba path is measured when numba
imports (a first warm-up call excludes JIT compilation from the timing).
Setting FRS_DISABLE_NUMBA=1 switches the package itself to the numpy path;
this script imports both implementations directly and ignores the flag.
"""

import argparse
import time

import numpy as np

from frstokes._accel import l1_scalar_solve_numpy

try:
    from numba import njit  # noqa: F401 -- availability probe

    from frstokes import _accel as _accel_mod

    NUMBA_IMPL = getattr(_accel_mod, "_l1_scalar_solve_numba", None)
except ImportError:
    NUMBA_IMPL = None


def time_impl(impl, n, repeats):
    fvals = np.zeros(n + 1)
    impl(1.0, 1.0, 0.5, 1.0, np.zeros(101), 1e-2)  # warm-up / JIT
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        y = impl(1.0, 1.0, 0.5, 1.0, fvals, 1.0 / n)
        best = min(best, time.perf_counter() - t0)
    return best, float(y[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rows = []
    t_np, y_np = time_impl(l1_scalar_solve_numpy, args.steps, args.repeats)
    rows.append(("numpy", t_np, y_np))
    if NUMBA_IMPL is not None:
        t_nb, y_nb = time_impl(NUMBA_IMPL, args.steps, args.repeats)
        rows.append(("numba", t_nb, y_nb))
        if y_nb != y_np:
            print(f"WARNING: backend results differ: {y_np!r} vs {y_nb!r}")
    else:
        print("numba not importable; only the numpy path was measured")

    print(f"\nL1 stepping, n = {args.steps} steps (best of {args.repeats}):")
    print(f"{'backend':8s} {'seconds':>10s} {'steps/s':>12s}   y(T)")
    for name, seconds, y in rows:
        print(f"{name:8s} {seconds:10.3f} {args.steps / seconds:12.0f}   {y:.12f}")


if __name__ == "__main__":
    main()
