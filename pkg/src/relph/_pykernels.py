"""Pure Python / numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is unavailable or ``RELPH_PURE_PYTHON=1``.
"""
from __future__ import annotations

import numpy as np


def rips_triangles(d: np.ndarray, adj: np.ndarray):
    """Triangles whose three edges are all present in the upper-triangular ``adj``."""
    n = len(d)
    tris, vals = [], []
    full = adj | adj.T
    for i in range(n):
        nbr = np.flatnonzero(adj[i])
        for a in range(len(nbr)):
            j = nbr[a]
            ks = nbr[a + 1:]
            ks = ks[full[j, ks]]
            if len(ks) == 0:
                continue
            v = np.maximum(np.maximum(d[i, j], d[i, ks]), d[j, ks])
            tris.extend((i, j, int(k)) for k in ks)
            vals.append(v)
    if not tris:
        return np.zeros((0, 3), dtype=np.int64), np.zeros(0)
    return np.array(tris, dtype=np.int64), np.concatenate(vals)


def dowker_simplex_values(c: np.ndarray):
    """Min-over-columns of max-over-rows for every row pair and row triple.

    Edge values follow ``np.triu_indices(n, 1)`` order and triangle values
    follow ``itertools.combinations(range(n), 3)`` order.
    """
    n = len(c)
    ev = np.empty(n * (n - 1) // 2)
    tv = np.empty(n * (n - 1) * (n - 2) // 6)
    e = t = 0
    for i in range(n):
        rest = np.maximum(c[i], c[i + 1:])        # (n-i-1, m)
        m = len(rest)
        ev[e:e + m] = rest.min(axis=1)
        e += m
        for a in range(m - 1):
            j = i + 1 + a
            block = np.maximum(rest[a], c[j + 1:]).min(axis=1)
            tv[t:t + len(block)] = block
            t += len(block)
    return ev, tv


def reduce_boundary(columns, dims, max_dim: int):
    """Z/2 column reduction with clearing; returns ``low`` (pivot row or -1).

    Columns are processed from the highest dimension down; once a column of
    dimension d has pivot i, column i (dimension d - 1) is known to reduce to
    zero and is skipped.
    """
    n = len(columns)
    low = np.full(n, -1, dtype=np.int64)
    pivot_of = {}
    cleared = np.zeros(n, dtype=bool)
    reduced = {}
    by_dim = [[] for _ in range(max_dim + 1)]
    for j, d in enumerate(dims):
        by_dim[d].append(j)
    for d in range(max_dim, 0, -1):
        for j in by_dim[d]:
            if cleared[j]:
                continue
            col = set(columns[j])
            while col:
                piv = max(col)
                k = pivot_of.get(piv)
                if k is None:
                    break
                col ^= reduced[k]
            if col:
                piv = max(col)
                pivot_of[piv] = j
                low[j] = piv
                reduced[j] = col
                cleared[piv] = True
    return low


def linear_assignment(cost: np.ndarray) -> np.ndarray:
    """Hungarian algorithm (shortest augmenting path with potentials), O(n^3).

    Returns ``assign`` with ``assign[i]`` the column matched to row ``i``.
    """
    cost = np.asarray(cost, dtype=float)
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)      # p[j]: row matched to column j (1-based)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            cand = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(cand)) + 1
            delta = cand[j1 - 1]
            usedj = used.copy()
            u[p[usedj]] += delta
            v[usedj] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    assign = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        assign[p[j] - 1] = j - 1
    return assign


def max_matching(adj: np.ndarray) -> int:
    """Size of a maximum matching of the bipartite graph given by boolean ``adj``."""
    n_left = adj.shape[0]
    nbrs = [np.flatnonzero(row).tolist() for row in adj]
    match_right = [-1] * adj.shape[1]

    def augment(u, seen):
        for v in nbrs[u]:
            if seen[v]:
                continue
            seen[v] = True
            if match_right[v] < 0 or augment(match_right[v], seen):
                match_right[v] = u
                return True
        return False

    size = 0
    for u in range(n_left):
        if augment(u, [False] * adj.shape[1]):
            size += 1
    return size
