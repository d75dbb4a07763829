#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times exact balanced-cut enumeration and 1-swap hill climbing on random
integer-weight instances, checks that both backends return identical
results, and prints a comparison table.

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from mixcut import kernels


def random_weights(rng, n, hi=40):
    w = rng.integers(0, hi, (n, n), dtype=np.int64)
    w = w + w.T
    np.fill_diagonal(w, 0)
    return w


def timed(fn, *args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_exact(rng, sizes):
    print(f"{'exact enumeration':<24} {'cuts':>10} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for n in sizes:
        w = random_weights(rng, n)
        if kernels.HAS_NUMBA:
            kernels.exact_max_balanced_cut_numba(w)  # warm the JIT cache
            t_nb, res_nb = timed(kernels.exact_max_balanced_cut_numba, w)
        else:
            t_nb, res_nb = float("nan"), None
        t_np, res_np = timed(kernels.exact_max_balanced_cut_numpy, w)
        if res_nb is not None:
            assert res_nb[0] == res_np[0] and np.array_equal(res_nb[1], res_np[1])
        cuts = kernels.n_balanced_cuts(n)
        speedup = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"  2N={n:<20} {cuts:>10} {t_nb:>9.4f}s {t_np:>9.4f}s {speedup:>7.1f}x")


def bench_hillclimb(rng, sizes):
    print(f"{'hill climb (one sweep)':<24} {'nodes':>10} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for n in sizes:
        w = random_weights(rng, n)
        m = np.zeros(n, np.uint8)
        m[: n // 2] = 1
        if kernels.HAS_NUMBA:
            kernels.hillclimb_sweep_numba(w, m)
            t_nb, res_nb = timed(kernels.hillclimb_sweep_numba, w, m)
        else:
            t_nb, res_nb = float("nan"), None
        t_np, res_np = timed(kernels.hillclimb_sweep_numpy, w, m)
        if res_nb is not None:
            assert res_nb[0] == res_np[0] and np.array_equal(res_nb[1], res_np[1])
        speedup = t_np / t_nb if t_nb == t_nb else float("nan")
        print(f"  n={n:<21} {n:>10} {t_nb:>9.4f}s {t_np:>9.4f}s {speedup:>7.1f}x")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller sizes")
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    if not kernels.HAS_NUMBA:
        print("numba not installed: timing the numpy fallback only")
    exact_sizes = (12, 16) if args.quick else (16, 20, 22)
    climb_sizes = (64, 128) if args.quick else (128, 256, 512)
    bench_exact(rng, exact_sizes)
    bench_hillclimb(rng, climb_sizes)


if __name__ == "__main__":
    main()
