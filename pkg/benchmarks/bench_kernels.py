"""Timing comparison of the reflection kernels: numba jit vs numpy scan.

Run from the repository root:

    python benchmarks/bench_kernels.py [--paths 20000] [--steps 5000]

The numba backend is selected automatically on import unless SRL_NO_NUMBA
is set, so this script imports the private backend functions directly and
times both regardless of the environment flag.
"""

import argparse
import time

import numpy as np

from srl import _kernels


def _time(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    dt = 0.02
    incs2d = 0.25 * dt + np.sqrt(dt) * rng.standard_normal(
        (args.paths, args.steps))
    incs1d = incs2d[0]

    print(f"active backend: {_kernels.backend_name()}")
    print(f"paths={args.paths} steps={args.steps}")

    rows = []
    t_np = _time(_kernels._reflect_path_np, 1.0, 1.23, incs1d)
    rows.append(("reflect_path (1 path)", "numpy", t_np))
    t_np2 = _time(_kernels._reflect_totals_np, 1.0, 1.23, incs2d,
                  0.1, 1.0, 0.1, dt)
    rows.append(("reflect_totals", "numpy", t_np2))

    have_numba = hasattr(_kernels, "_reflect_path_nb")
    if have_numba:
        # warm up compilation outside the timed region
        _kernels._reflect_path_nb(1.0, 1.23, incs1d)
        _kernels._reflect_totals_nb(1.0, 1.23, incs2d, 0.1, 1.0, 0.1, dt)
        t_nb = _time(_kernels._reflect_path_nb, 1.0, 1.23, incs1d)
        rows.append(("reflect_path (1 path)", "numba", t_nb))
        t_nb2 = _time(_kernels._reflect_totals_nb, 1.0, 1.23, incs2d,
                      0.1, 1.0, 0.1, dt)
        rows.append(("reflect_totals", "numba", t_nb2))
    else:
        print("numba backend unavailable; timing numpy backend only")

    print(f"{'kernel':<24}{'backend':<10}{'best (ms)':>12}")
    for name, backend, t in rows:
        print(f"{name:<24}{backend:<10}{t * 1e3:>12.3f}")
    if have_numba:
        print(f"reflect_totals speedup: {t_np2 / t_nb2:.2f}x "
              f"(numba over numpy)")


if __name__ == "__main__":
    main()
