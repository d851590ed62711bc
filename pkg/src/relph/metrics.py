"""Bottleneck and q-Wasserstein distances between persistence diagrams.

Both are exact optima over bijections of the diagonal-augmented diagrams:
each side is padded with one diagonal slot per point of the other side, a
point may go to any diagonal slot at the cost of its distance to the
diagonal, and diagonal slots match each other for free.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels
from .errors import DimensionMismatchError, InvalidSpecError
from .persistence import PersistenceDiagram


def _split(a: PersistenceDiagram, b: PersistenceDiagram):
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot compare dimension {a.dim} with {b.dim}")
    # canonical argument order makes d(a, b) and d(b, a) the same computation
    if (len(b), b.sorted_pairs()) < (len(a), a.sorted_pairs()):
        a, b = b, a
    fa, fb = a.finite, b.finite
    # points on the diagonal match their own projection at zero cost
    fa = fa[fa[:, 0] != fa[:, 1]]
    fb = fb[fb[:, 0] != fb[:, 1]]
    return fa, fb, np.sort(a.essential), np.sort(b.essential)


def _augmented_cost(fa: np.ndarray, fb: np.ndarray, norm: str) -> np.ndarray:
    n, m = len(fa), len(fb)
    size = n + m
    cost = np.zeros((size, size))
    if norm == "inf":
        if n and m:
            cost[:n, :m] = np.abs(fa[:, None, :] - fb[None, :, :]).max(-1)
        diag_a = (fa[:, 1] - fa[:, 0]) / 2
        diag_b = (fb[:, 1] - fb[:, 0]) / 2
    else:
        if n and m:
            cost[:n, :m] = np.sqrt(((fa[:, None, :] - fb[None, :, :]) ** 2).sum(-1))
        diag_a = (fa[:, 1] - fa[:, 0]) / math.sqrt(2)
        diag_b = (fb[:, 1] - fb[:, 0]) / math.sqrt(2)
    cost[:n, m:] = diag_a[:, None]
    cost[n:, :m] = diag_b[None, :]
    return cost


def bottleneck(a: PersistenceDiagram, b: PersistenceDiagram, backend=None) -> float:
    """Exact bottleneck distance (L-infinity ground metric).

    Returns +inf when the diagrams have different numbers of essential classes.
    """
    impl = backend or kernels
    fa, fb, ea, eb = _split(a, b)
    if len(ea) != len(eb):
        return math.inf
    ess = float(np.abs(ea - eb).max()) if len(ea) else 0.0
    if len(fa) + len(fb) == 0:
        return ess
    cost = _augmented_cost(fa, fb, "inf")
    cand = np.unique(cost)
    size = len(cost)
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if impl.max_matching(cost <= cand[mid]) == size:
            hi = mid
        else:
            lo = mid + 1
    return max(ess, float(cand[lo]))


def wasserstein(a: PersistenceDiagram, b: PersistenceDiagram, q: float = 1.0,
                backend=None) -> float:
    """Exact q-Wasserstein distance with the Euclidean ground metric."""
    if not q >= 1 or math.isinf(q):
        raise InvalidSpecError(f"q must be a finite number >= 1, got {q}")
    impl = backend or kernels
    fa, fb, ea, eb = _split(a, b)
    if len(ea) != len(eb):
        return math.inf
    terms = (np.abs(ea - eb) ** q).tolist()
    if len(fa) + len(fb):
        cost = _augmented_cost(fa, fb, "2") ** q
        assign = impl.linear_assignment(cost)
        terms += cost[np.arange(len(cost)), assign].tolist()
    return math.fsum(terms) ** (1.0 / q)


def distance(a, b, metric: str = "bottleneck", q: float = 1.0) -> float:
    if metric == "bottleneck":
        return bottleneck(a, b)
    if metric == "wasserstein":
        return wasserstein(a, b, q)
    raise InvalidSpecError(f"unknown metric {metric!r}")
