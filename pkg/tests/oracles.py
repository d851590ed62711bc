"""Independent reference computations used by several test modules."""
from itertools import combinations, permutations

import numpy as np


def gf2_rank(M: np.ndarray) -> int:
    """Rank over Z/2 by row reduction on a uint8 matrix."""
    A = (np.asarray(M) % 2).astype(np.uint8).copy()
    rank = 0
    rows, cols = A.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r, c]), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        for r in range(rows):
            if r != rank and A[r, c]:
                A[r] ^= A[rank]
        rank += 1
    return rank


def betti(simplices, k: int) -> int:
    """dim H_k over Z/2 of the complex spanned by ``simplices`` (closed under faces)."""
    by = {d: sorted({s for s in simplices if len(s) == d + 1}) for d in range(4)}

    def boundary(d):
        if d == 0 or not by[d] or not by[d - 1]:
            return np.zeros((len(by[d - 1]) if d > 0 else 0, len(by[d])), dtype=np.uint8)
        idx = {s: i for i, s in enumerate(by[d - 1])}
        B = np.zeros((len(by[d - 1]), len(by[d])), dtype=np.uint8)
        for j, s in enumerate(by[d]):
            for f in combinations(s, d):
                B[idx[f], j] = 1
        return B

    rk_k = gf2_rank(boundary(k)) if k > 0 and by[k] else 0
    rk_k1 = gf2_rank(boundary(k + 1)) if by[k + 1] else 0
    return len(by[k]) - rk_k - rk_k1


def random_filtered_complex(rng, max_simplices: int = 12, value_pool: int = 5):
    """Random face-closed complex (dim <= 2) with monotone values drawn from a small pool."""
    nv = int(rng.integers(1, 6))
    simplices = [(v,) for v in range(nv)]
    edges = [e for e in combinations(range(nv), 2) if rng.random() < 0.6]
    simplices += edges
    es = set(edges)
    tris = [t for t in combinations(range(nv), 3)
            if all(f in es for f in combinations(t, 2)) and rng.random() < 0.6]
    simplices += tris
    simplices = simplices[:max_simplices]
    # drop triangles whose edges were cut
    kept = set(simplices)
    simplices = [s for s in simplices if all(f in kept for f in combinations(s, len(s) - 1)) or len(s) == 1]
    values = {}
    for s in simplices:
        own = float(rng.integers(0, value_pool))
        faces = [values[f] for f in combinations(s, len(s) - 1)] if len(s) > 1 else []
        values[s] = max([own] + faces)
    return simplices, values


def _diag_cost_inf(p):
    return (p[1] - p[0]) / 2


def _diag_cost_2(p):
    return (p[1] - p[0]) / np.sqrt(2)


def brute_force_distances(A, B):
    """(bottleneck, 1-Wasserstein) by enumerating every partial matching of finite diagrams.

    Each point of A is either matched to a distinct point of B or sent to the
    diagonal; unmatched points of B go to the diagonal.
    """
    A = [tuple(p) for p in A]
    B = [tuple(p) for p in B]
    best_b, best_w = np.inf, np.inf
    n, m = len(A), len(B)
    for r in range(min(n, m) + 1):
        for sa in combinations(range(n), r):
            for sb in permutations(range(m), r):
                pairs = list(zip(sa, sb))
                costs_b, costs_w = [], []
                for i, j in pairs:
                    a, b = A[i], B[j]
                    costs_b.append(max(abs(a[0] - b[0]), abs(a[1] - b[1])))
                    costs_w.append(float(np.hypot(a[0] - b[0], a[1] - b[1])))
                for i in set(range(n)) - set(sa):
                    costs_b.append(_diag_cost_inf(A[i]))
                    costs_w.append(_diag_cost_2(A[i]))
                for j in set(range(m)) - set(sb):
                    costs_b.append(_diag_cost_inf(B[j]))
                    costs_w.append(_diag_cost_2(B[j]))
                best_b = min(best_b, max(costs_b, default=0.0))
                best_w = min(best_w, sum(costs_w))
    return float(best_b), float(best_w)
