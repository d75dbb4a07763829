"""Hot inner loops: exact balanced-cut enumeration and 1-swap hill climbing.

Two interchangeable backends produce bit-identical results:

* ``numba`` (default when importable) JIT-compiles the loops; the enumerator
  walks combinations in lexicographic order and maintains the cut weight
  incrementally (O(N) per single-node move instead of O(N^2) recomputation).
* ``numpy`` evaluates combination chunks with dense matrix products; it is
  the fallback when numba is absent and the reference for the benchmark in
  ``benchmarks/bench_kernels.py``.

Select explicitly with the env flag ``MIXCUT_BACKEND=numba|numpy``.

Cut-weight bookkeeping used throughout: with membership m (1 = side_s),
g[v] = sum_{j in S} w[v, j] and rowtot[v] = sum_j w[v, j], the cut weight is
sum_{v not in S} g[v]; moving v into S changes the weight by
rowtot[v] - 2 g[v], moving it out by 2 g[v] - rowtot[v], and swapping
u in S with v outside changes it by
2 g[u] - 2 g[v] + 2 w[u, v] - rowtot[u] + rowtot[v].
"""

from __future__ import annotations

import math
import os
from itertools import combinations, islice

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


__all__ = [
    "HAS_NUMBA",
    "active_backend",
    "exact_max_balanced_cut",
    "exact_max_balanced_cut_numba",
    "exact_max_balanced_cut_numpy",
    "hillclimb_sweep",
    "hillclimb_sweep_numba",
    "hillclimb_sweep_numpy",
]

_CHUNK = 16384


def active_backend() -> str:
    """Backend chosen by MIXCUT_BACKEND, defaulting to numba when present."""
    choice = os.environ.get("MIXCUT_BACKEND", "").strip().lower()
    if choice in ("numba", "numpy"):
        if choice == "numba" and not HAS_NUMBA:
            raise RuntimeError("MIXCUT_BACKEND=numba but numba is not installed")
        return choice
    return "numba" if HAS_NUMBA else "numpy"


@njit(cache=True, nogil=True)
def _exact_kernel(w):  # pragma: no cover - compiled
    n = w.shape[0]
    r = n // 2 - 1  # side_s members drawn from {1..n-1}; node 0 is fixed
    c = np.empty(r, np.int64)
    for i in range(r):
        c[i] = i + 1
    m = np.zeros(n, np.uint8)
    m[0] = 1
    for i in range(r):
        m[c[i]] = 1
    rowtot = np.zeros(n, np.int64)
    g = np.zeros(n, np.int64)
    for v in range(n):
        tot = 0
        acc = 0
        for j in range(n):
            tot += w[v, j]
            if m[j] == 1:
                acc += w[v, j]
        rowtot[v] = tot
        g[v] = acc
    weight = 0
    for v in range(n):
        if m[v] == 0:
            weight += g[v]
    best_w = weight
    best_m = m.copy()
    tie = False
    evals = 1
    while True:
        i = r - 1
        while i >= 0 and c[i] == n - r + i:
            i -= 1
        if i < 0:
            break
        for j in range(r - 1, i - 1, -1):
            v = c[j]
            m[v] = 0
            weight += 2 * g[v] - rowtot[v]
            for t in range(n):
                g[t] -= w[t, v]
        base = c[i] + 1
        for j in range(i, r):
            v = base + (j - i)
            c[j] = v
            m[v] = 1
            weight += rowtot[v] - 2 * g[v]
            for t in range(n):
                g[t] += w[t, v]
        evals += 1
        if weight > best_w:
            best_w = weight
            tie = False
            for t in range(n):
                best_m[t] = m[t]
        elif weight == best_w:
            tie = True  # first maximizer (lex-least side_s tuple) is kept
    return best_w, best_m, tie, evals


def exact_max_balanced_cut_numba(weights: np.ndarray):
    w = np.ascontiguousarray(weights, dtype=np.int64)
    best_w, best_m, tie, evals = _exact_kernel(w)
    return int(best_w), np.asarray(best_m, dtype=np.uint8), bool(tie), int(evals)


def exact_max_balanced_cut_numpy(weights: np.ndarray):
    w = np.asarray(weights, dtype=np.int64)
    n = w.shape[0]
    r = n // 2 - 1
    best_w = None
    best_m = None
    tie = False
    evals = 0
    combos = combinations(range(1, n), r)
    while True:
        block = list(islice(combos, _CHUNK))
        if not block:
            break
        idx = np.asarray(block, dtype=np.int64).reshape(len(block), r)
        m = np.zeros((len(block), n), dtype=np.int64)
        m[:, 0] = 1
        np.put_along_axis(m, idx, 1, axis=1)
        across = m @ w  # row v: sum over side_s of w[., v]
        cw = (across * (1 - m)).sum(axis=1)
        evals += len(block)
        top = int(cw.max())
        hits = int((cw == top).sum())
        if best_w is None or top > best_w:
            best_w = top
            best_m = m[int(np.argmax(cw))].astype(np.uint8)
            tie = hits > 1
        elif top == best_w:
            tie = True
    return int(best_w), best_m, bool(tie), int(evals)


def exact_max_balanced_cut(weights: np.ndarray):
    """Maximum-weight canonical balanced cut.

    Returns (best_weight, membership uint8[n], tie, evaluations); ties keep
    the first maximizer in enumeration order, i.e. the lexicographically
    smallest side_s index tuple.
    """
    if active_backend() == "numba":
        return exact_max_balanced_cut_numba(weights)
    return exact_max_balanced_cut_numpy(weights)


@njit(cache=True, nogil=True)
def _climb_kernel(w, m, first_improvement):  # pragma: no cover - compiled
    n = w.shape[0]
    rowtot = np.zeros(n, np.int64)
    g = np.zeros(n, np.int64)
    for v in range(n):
        tot = 0
        acc = 0
        for j in range(n):
            tot += w[v, j]
            if m[j] == 1:
                acc += w[v, j]
        rowtot[v] = tot
        g[v] = acc
    weight = 0
    for v in range(n):
        if m[v] == 0:
            weight += g[v]
    evals = 0
    moves = 0
    while True:
        best_delta = 0
        bu = -1
        bv = -1
        done = False
        for u in range(n):
            if m[u] != 1:
                continue
            for v in range(n):
                if m[v] != 0:
                    continue
                evals += 1
                delta = 2 * g[u] - 2 * g[v] + 2 * w[u, v] - rowtot[u] + rowtot[v]
                if delta > best_delta:
                    best_delta = delta
                    bu = u
                    bv = v
                    if first_improvement:
                        done = True
                        break
            if done:
                break
        if best_delta <= 0:
            break
        m[bu] = 0
        m[bv] = 1
        weight += best_delta
        moves += 1
        for t in range(n):
            g[t] += w[t, bv] - w[t, bu]
    return weight, evals, moves


def hillclimb_sweep_numba(weights: np.ndarray, membership: np.ndarray, first_improvement: bool = False):
    w = np.ascontiguousarray(weights, dtype=np.int64)
    m = np.ascontiguousarray(membership, dtype=np.uint8).copy()
    weight, evals, moves = _climb_kernel(w, m, first_improvement)
    return int(weight), m, int(evals), int(moves)


def hillclimb_sweep_numpy(weights: np.ndarray, membership: np.ndarray, first_improvement: bool = False, trace=None):
    w = np.asarray(weights, dtype=np.int64)
    m = np.asarray(membership, dtype=np.uint8).copy()
    rowtot = w.sum(axis=1)
    in_s = m.astype(bool)
    g = w[:, in_s].sum(axis=1)
    weight = int(g[~in_s].sum())
    evals = 0
    moves = 0
    while True:
        s_idx = np.flatnonzero(in_s)
        sbar_idx = np.flatnonzero(~in_s)
        # delta[u, v] for swapping u (side_s) with v (side_sbar)
        delta = (
            (2 * g[s_idx] - rowtot[s_idx])[:, None]
            + (rowtot[sbar_idx] - 2 * g[sbar_idx])[None, :]
            + 2 * w[np.ix_(s_idx, sbar_idx)]
        )
        evals += delta.size
        if first_improvement:
            pos = np.argwhere(delta > 0)
            if pos.size == 0:
                break
            ui, vi = pos[0]
            best = int(delta[ui, vi])
        else:
            flat = int(np.argmax(delta))
            ui, vi = divmod(flat, delta.shape[1])
            best = int(delta[ui, vi])
            if best <= 0:
                break
        u, v = int(s_idx[ui]), int(sbar_idx[vi])
        in_s[u] = False
        in_s[v] = True
        g = g + w[:, v] - w[:, u]
        weight += best
        moves += 1
        if trace is not None:
            trace.append(weight)
    m = in_s.astype(np.uint8)
    return int(weight), m, int(evals), int(moves)


def hillclimb_sweep(weights: np.ndarray, membership: np.ndarray, first_improvement: bool = False):
    """Best-improvement 1-swap local search from a balanced start.

    Scan order is (u ascending over side_s) x (v ascending over side_sbar);
    both backends apply the first swap attaining the best positive gain, so
    results are identical.  Returns (weight, membership, evaluations, moves).
    """
    if active_backend() == "numba":
        return hillclimb_sweep_numba(weights, membership, first_improvement)
    return hillclimb_sweep_numpy(weights, membership, first_improvement)


def n_balanced_cuts(n_nodes: int) -> int:
    return math.comb(n_nodes - 1, n_nodes // 2 - 1)
