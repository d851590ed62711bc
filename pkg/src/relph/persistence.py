"""Persistence diagrams by Z/2 boundary-matrix reduction."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .errors import MissingFaceError, RelphError
from .filtrations import MAX_DIM, FilteredComplex


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Birth/death pairs of one homology dimension; essential classes die at +inf."""

    dim: int
    pairs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pairs, dtype=float).reshape(-1, 2)
        if np.isnan(arr).any() or (arr[:, 0] > arr[:, 1]).any() or np.isinf(arr[:, 0]).any():
            raise RelphError("diagram pairs need finite birth <= death")
        arr.setflags(write=False)
        object.__setattr__(self, "pairs", arr)

    def __len__(self):
        return len(self.pairs)

    @property
    def finite(self) -> np.ndarray:
        return self.pairs[np.isfinite(self.pairs[:, 1])]

    @property
    def essential(self) -> np.ndarray:
        """Births of the classes that never die."""
        return self.pairs[np.isinf(self.pairs[:, 1]), 0]

    def betti(self, t: float) -> int:
        b, d = self.pairs[:, 0], self.pairs[:, 1]
        return int(((b <= t) & (t < d)).sum())

    def sorted_pairs(self) -> list:
        return sorted(map(tuple, self.pairs.tolist()))

    def same_as(self, other: "PersistenceDiagram") -> bool:
        """Exact multiset equality."""
        return self.dim == other.dim and self.sorted_pairs() == other.sorted_pairs()

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self):
        return hash((self.dim, tuple(self.sorted_pairs())))

    def to_json(self) -> dict:
        pairs = [[float(b), "inf" if math.isinf(d) else float(d)] for b, d in self.sorted_pairs()]
        return {"dim": int(self.dim), "pairs": pairs}

    @classmethod
    def from_json(cls, obj) -> "PersistenceDiagram":
        if isinstance(obj, str):
            obj = json.loads(obj)
        pairs = [(float(b), math.inf if d == "inf" else float(d)) for b, d in obj["pairs"]]
        return cls(int(obj["dim"]), np.array(pairs, dtype=float).reshape(-1, 2))


@dataclass(frozen=True)
class BoundaryMatrix:
    columns: list       # sorted row positions (codim-1 faces), one per simplex
    dims: np.ndarray


@dataclass(frozen=True)
class Reduction:
    pairs: list         # (birth position, death position)
    essential: list     # positions of never-killed positive simplices
    low: np.ndarray


def boundary_matrix(fc: FilteredComplex) -> BoundaryMatrix:
    pos = fc.index()
    cols = []
    for j, s in enumerate(fc.simplices):
        if len(s) == 1:
            cols.append([])
            continue
        rows = []
        for face in combinations(s, len(s) - 1):
            i = pos.get(face)
            if i is None or i >= j:
                raise MissingFaceError(f"face {face} of {s} missing or out of order")
            rows.append(i)
        cols.append(sorted(rows))
    return BoundaryMatrix(cols, fc.dims)


def reduce(bm: BoundaryMatrix, backend=None) -> Reduction:
    """Standard left-to-right reduction with clearing (highest dimension first)."""
    impl = backend or kernels
    n = len(bm.columns)
    if n == 0:
        return Reduction([], [], np.zeros(0, dtype=np.int64))
    max_dim = int(bm.dims.max())
    low = impl.reduce_boundary(bm.columns, bm.dims, max_dim)
    pairs = [(int(low[j]), j) for j in np.flatnonzero(low >= 0)]
    paired = np.zeros(n, dtype=bool)
    paired[low[low >= 0]] = True
    paired[low >= 0] = True
    essential = np.flatnonzero(~paired).tolist()
    return Reduction(sorted(pairs), essential, low)


def diagrams(fc: FilteredComplex, drop_zero: bool = False, max_dim: int = 1,
             backend=None) -> tuple:
    """Persistence diagrams of dimensions 0..max_dim (default PD0, PD1)."""
    red = reduce(boundary_matrix(fc), backend=backend)
    dims = fc.dims
    vals = fc.values
    out = {k: [] for k in range(max_dim + 1)}
    for b, d in red.pairs:
        k = int(dims[b])
        if k > max_dim:
            continue
        if drop_zero and vals[b] == vals[d]:
            continue
        out[k].append((vals[b], vals[d]))
    for e in red.essential:
        k = int(dims[e])
        if k <= max_dim:
            out[k].append((vals[e], math.inf))
    return tuple(PersistenceDiagram(k, np.array(out[k], dtype=float).reshape(-1, 2))
                 for k in range(max_dim + 1))


def betti_numbers_bruteforce(simplices, max_dim: int = 1) -> list:
    """Z/2 Betti numbers of a finite complex by Gaussian elimination of boundaries.

    Independent of the persistence path; used as a test oracle.
    """
    by_dim = {k: sorted(s for s in simplices if len(s) == k + 1) for k in range(MAX_DIM + 1)}

    def rank(k):
        # rank of boundary map C_k -> C_{k-1}
        if k == 0 or not by_dim[k] or not by_dim[k - 1]:
            return 0
        idx = {s: i for i, s in enumerate(by_dim[k - 1])}
        rows = []
        for s in by_dim[k]:
            r = 0
            for face in combinations(s, k):
                r |= 1 << idx[face]
            rows.append(r)
        rk = 0
        pivots = {}
        for r in rows:
            while r:
                top = r.bit_length() - 1
                if top in pivots:
                    r ^= pivots[top]
                else:
                    pivots[top] = r
                    rk += 1
                    break
        return rk

    return [len(by_dim[k]) - rank(k) - rank(k + 1) for k in range(max_dim + 1)]
