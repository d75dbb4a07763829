"""Independent reference implementations used as ground truth by the tests.

Everything here is deliberately naive (bitmask loops, double sums) and
written separately from the production code paths it checks.
"""

import numpy as np


def score_brute(x, y):
    total = 0
    for a, b in zip(x, y):
        total += int(a) * int(b)
    return total


def hamming_brute(x, y):
    total = 0
    for a, b in zip(x, y):
        total += int(int(a) != int(b))
    return total


def cut_weight_brute(weights, side_s):
    inside = set(side_s)
    n = len(weights)
    total = 0
    for i in inside:
        for j in range(n):
            if j not in inside:
                total += int(weights[i][j])
    return total


def _balanced_masks(n):
    half = n // 2
    for mask in range(1, 1 << n, 2):  # bit 0 set: canonical representative
        if bin(mask).count("1") == half:
            yield tuple(i for i in range(n) if mask >> i & 1)


def naive_extreme_balanced_cut(weights, maximize=True):
    """Brute-force optimal balanced cut via a bitmask sweep.

    Returns (weight, side_s tuple, tie); ties resolved to the
    lexicographically smallest side_s tuple.
    """
    n = len(weights)
    scored = [(cut_weight_brute(weights, s), s) for s in _balanced_masks(n)]
    best = max(w for w, _ in scored) if maximize else min(w for w, _ in scored)
    winners = sorted(s for w, s in scored if w == best)
    return best, winners[0], len(winners) > 1


def four_term_diff(weights, ref_side_s, other_side_s, n_nodes):
    """Sum of the cut definition's four edge groups between swapped and
    unswapped nodes: the explicit form of the cut-score difference."""
    ref = set(ref_side_s)
    oth = set(other_side_s)
    kept_s = ref & oth
    moved_out = ref - oth  # left the reference side_s
    moved_in = oth - ref   # joined it
    kept_sbar = set(range(n_nodes)) - ref - moved_in
    total = 0
    for v in moved_in:
        for y in kept_sbar:
            total += int(weights[v][y])
        for x in kept_s:
            total -= int(weights[v][x])
    for u in moved_out:
        for x in kept_s:
            total += int(weights[u][x])
        for y in kept_sbar:
            total -= int(weights[u][y])
    return total


def random_model(rng, k):
    from mixcut.model import MixtureModel

    return MixtureModel(p1=rng.random(k), p2=rng.random(k))


def random_instance(rng, n_per_side, k_lo=4, k_hi=24):
    """Random (model, dataset) pair for oracle comparisons."""
    from mixcut.model import sample

    k = int(rng.integers(k_lo, k_hi + 1))
    model = random_model(rng, k)
    seed = int(rng.integers(0, 2**63 - 1))
    return model, sample(model, n_per_side, seed)
