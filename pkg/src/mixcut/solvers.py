"""Balanced-cut solvers: exact enumeration, hill climbing, spectral baseline.

The exact solver enumerates every canonical balanced cut (node 0 fixed on
side_s) and is the ground truth at desk scale; C(2N-1, N-1) cuts, capped by
default at 2N = 24 nodes (~1.35M cuts).  The hill climber applies
best-improving 1-swaps (one node each way, balance preserved) from random
balanced starts.  The spectral baseline centers the bit matrix by its global
column means and splits the nodes on the leading left singular vector:
centering removes the all-samples mean direction, which otherwise occupies
the top of the uncentered spectrum, so the between-population axis is the
leading direction of the centered matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import BalancedCut, CutGraph, Metric, build_graph, cut_weight, true_partition
from .model import Dataset

__all__ = [
    "SolveResult",
    "EnumerationCapError",
    "DegenerateInstanceError",
    "DEFAULT_ENUMERATION_CAP",
    "solve_exact",
    "solve_hillclimb",
    "solve_spectral",
    "evaluate",
    "climb_trace",
]

DEFAULT_ENUMERATION_CAP = 24


class EnumerationCapError(ValueError):
    """Instance exceeds the exact-enumeration node cap."""


class DegenerateInstanceError(ValueError):
    """Input admits no meaningful separation (e.g. all rows identical)."""


@dataclass(frozen=True)
class SolveResult:
    best_cut: BalancedCut
    best_weight: int
    method: str
    evaluations: int
    tie: bool


def solve_exact(graph: CutGraph, cap_nodes: int = DEFAULT_ENUMERATION_CAP) -> SolveResult:
    """Maximum-weight balanced cut by full enumeration.

    Ties keep the lexicographically smallest side_s index tuple (the first
    maximizer in enumeration order) and set the tie flag.
    """
    if graph.n_nodes > cap_nodes:
        raise EnumerationCapError(
            f"instance has {graph.n_nodes} nodes; exact enumeration is capped at "
            f"{cap_nodes} nodes ({kernels.n_balanced_cuts(cap_nodes)} cuts)"
        )
    best_w, best_m, tie, evals = kernels.exact_max_balanced_cut(graph.weights)
    return SolveResult(
        best_cut=BalancedCut.from_membership(best_m),
        best_weight=int(best_w),
        method="exact",
        evaluations=evals,
        tie=tie,
    )


def _random_balanced_membership(n_nodes: int, rng: np.random.Generator) -> np.ndarray:
    half = n_nodes // 2
    m = np.zeros(n_nodes, dtype=np.uint8)
    m[0] = 1
    rest = rng.permutation(np.arange(1, n_nodes))[: half - 1]
    m[rest] = 1
    return m


def solve_hillclimb(
    graph: CutGraph,
    restarts: int = 8,
    seed: int = 0,
    first_improvement: bool = False,
) -> SolveResult:
    """Best local optimum of 1-swap hill climbing over random restarts.

    Deterministic for a given seed: restart r draws its start from
    Philox(derive(seed, r)); equal-weight optima keep the earliest restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best_w = None
    best_m = None
    tie = False
    total_evals = 0
    for r in range(restarts):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(r,))
        rng = np.random.Generator(np.random.Philox(ss))
        start = _random_balanced_membership(graph.n_nodes, rng)
        w, m, evals, _moves = kernels.hillclimb_sweep(graph.weights, start, first_improvement)
        total_evals += evals + 1
        if best_w is None or w > best_w:
            best_w, best_m, tie = w, m, False
        elif w == best_w and not np.array_equal(m, best_m):
            tie = True
    return SolveResult(
        best_cut=BalancedCut.from_membership(best_m),
        best_weight=int(best_w),
        method="hillclimb",
        evaluations=total_evals,
        tie=tie,
    )


def climb_trace(graph: CutGraph, start: BalancedCut, first_improvement: bool = False):
    """Weights after each accepted swap of a single climb (for inspection)."""
    trace: list[int] = []
    w, m, _evals, _moves = kernels.hillclimb_sweep_numpy(
        graph.weights, start.membership(), first_improvement, trace=trace
    )
    return trace, int(w), BalancedCut.from_membership(m)


def solve_spectral(dataset: Dataset, metric: Metric = Metric.HAMMING) -> SolveResult:
    """Split on the leading left singular vector of the centered bit matrix.

    The top N nodes by singular-vector value form side_s; a global sign flip
    only mirrors the bipartition, so the result is sign-invariant.  The
    returned weight is the cut's weight under `metric`.
    """
    bits = dataset.bits.astype(np.float64)
    if np.all(dataset.bits == dataset.bits[0]):
        raise DegenerateInstanceError("all rows identical; no separation axis exists")
    centered = bits - bits.mean(axis=0, keepdims=True)
    u, _s, _vt = np.linalg.svd(centered, full_matrices=False)
    lead = u[:, 0]
    order = np.argsort(-lead, kind="stable")
    side = order[: dataset.n_per_side]
    cut = BalancedCut.from_side(side.tolist(), dataset.n_nodes)
    graph = build_graph(dataset, metric)
    return SolveResult(
        best_cut=cut,
        best_weight=cut_weight(graph, cut),
        method="spectral",
        evaluations=1,
        tie=False,
    )


def evaluate(result: SolveResult, dataset: Dataset) -> bool:
    """True iff the solved cut equals the label-induced bipartition
    (unordered comparison)."""
    if result.best_cut.n_nodes != dataset.n_nodes:
        raise ValueError("result and dataset node counts differ")
    truth = true_partition(dataset)
    got = set(result.best_cut.side_s)
    return got == set(truth.side_s) or got == set(truth.side_sbar)
