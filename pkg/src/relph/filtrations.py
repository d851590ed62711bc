"""Filtered simplicial complexes (dimension <= 2): Vietoris-Rips, Dowker, witness."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import kernels
from .errors import MissingFaceError, NotSymmetricError, RelphError, ZeroWitnessError
from .geometry import LabeledPointCloud, Triangulation, cross_distances

MAX_DIM = 2


@dataclass(frozen=True)
class FilteredComplex:
    """Simplices (sorted vertex tuples) with filtration values, in filtration order.

    Order is (value, dim, vertex tuple), so a face always precedes its cofaces
    when their values tie.
    """

    simplices: tuple
    values: np.ndarray

    @classmethod
    def from_unsorted(cls, simplices, values) -> "FilteredComplex":
        simplices = [tuple(s) for s in simplices]
        values = np.asarray(values, dtype=float)
        if len(simplices) != len(values):
            raise RelphError("one value per simplex required")
        if len(simplices) == 0:
            return cls((), np.zeros(0))
        padded = np.full((len(simplices), 3), -1, dtype=np.int64)
        dims = np.empty(len(simplices), dtype=np.int64)
        for i, s in enumerate(simplices):
            padded[i, :len(s)] = s
            dims[i] = len(s) - 1
        order = np.lexsort((padded[:, 2], padded[:, 1], padded[:, 0], dims, values))
        vals = values[order]
        vals.setflags(write=False)
        return cls(tuple(simplices[i] for i in order), vals)

    def __len__(self):
        return len(self.simplices)

    @property
    def dims(self) -> np.ndarray:
        return np.fromiter((len(s) - 1 for s in self.simplices), dtype=np.int64, count=len(self))

    def index(self) -> dict:
        return {s: i for i, s in enumerate(self.simplices)}

    def sublevel(self, t: float) -> list:
        return [s for s, v in zip(self.simplices, self.values) if v <= t]

    def check(self) -> None:
        """Raise if a face is missing, values decrease along a face, or order is wrong."""
        pos = self.index()
        for j, s in enumerate(self.simplices):
            if list(s) != sorted(set(s)) or not 1 <= len(s) <= MAX_DIM + 1:
                raise RelphError(f"malformed simplex {s}")
            for face in combinations(s, len(s) - 1) if len(s) > 1 else ():
                i = pos.get(face)
                if i is None:
                    raise MissingFaceError(f"face {face} of {s} missing")
                if self.values[i] > self.values[j]:
                    raise RelphError(f"face {face} enters after coface {s}")
                if i > j:
                    raise RelphError(f"face {face} ordered after coface {s}")

    def to_json(self) -> list:
        return [{"vertices": list(s), "value": float(v)} for s, v in zip(self.simplices, self.values)]

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _check_symmetric(dist: np.ndarray) -> None:
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1] or not np.array_equal(dist, dist.T):
        raise NotSymmetricError("distance matrix must be square and symmetric")


def vietoris_rips(dist, max_value: float = math.inf) -> FilteredComplex:
    """Rips filtration truncated at dimension 2 and at ``max_value``."""
    d = np.asarray(dist, dtype=float)
    _check_symmetric(d)
    if max_value < 0:
        raise RelphError("max_value must be nonnegative")
    n = len(d)
    simplices = [(i,) for i in range(n)]
    values = [0.0] * n
    iu, ju = np.triu_indices(n, 1)
    keep = d[iu, ju] <= max_value
    iu, ju = iu[keep], ju[keep]
    ev = d[iu, ju]
    simplices += list(zip(iu.tolist(), ju.tolist()))
    values += ev.tolist()
    adj = np.zeros((n, n), dtype=bool)
    adj[iu, ju] = True
    tri, tv = kernels.rips_triangles(d, adj)
    simplices += [tuple(t) for t in tri.tolist()]
    values += tv.tolist()
    return FilteredComplex.from_unsorted(simplices, values)


def dowker_values(cross, max_value: float = math.inf):
    """Dowker values for every row-simplex of dim <= 2.

    The value of a simplex is the smallest column whose row entries over the
    simplex are all within reach: min over columns of the max over the rows.
    Returns (vertex_values, edges, edge_values, triangles, triangle_values),
    already filtered by ``max_value``.
    """
    c = np.asarray(cross, dtype=float)
    if c.ndim != 2 or c.size == 0:
        raise RelphError("Dowker construction needs a nonempty |U| x |V| matrix")
    vv = c.min(axis=1)
    ev, tv = kernels.dowker_simplex_values(np.ascontiguousarray(c))
    n = len(c)
    iu, ju = np.triu_indices(n, 1)
    edges = np.stack([iu, ju], axis=1)
    tris = _triangle_index(n)
    return vv, edges, ev, tris, tv


def _triangle_index(n: int) -> np.ndarray:
    if n < 3:
        return np.zeros((0, 3), dtype=np.int64)
    return np.array(list(combinations(range(n), 3)), dtype=np.int64)


def dowker(cross, max_value: float = math.inf) -> FilteredComplex:
    """Dowker filtration on the row set of ``cross`` witnessed by its columns."""
    vv, edges, ev, tris, tv = dowker_values(cross, max_value)
    simplices, values = [], []
    keep = vv <= max_value
    simplices += [(int(i),) for i in np.flatnonzero(keep)]
    values += vv[keep].tolist()
    keep = ev <= max_value
    simplices += list(map(tuple, edges[keep].tolist()))
    values += ev[keep].tolist()
    keep = tv <= max_value
    simplices += list(map(tuple, tris[keep].tolist()))
    values += tv[keep].tolist()
    return FilteredComplex.from_unsorted(simplices, values)


def dowker_pair(cloud: LabeledPointCloud, species_u: str, species_v: str,
                max_value: float = math.inf) -> FilteredComplex:
    """Dowker filtration between two species using the smaller one as vertex set.

    Ties keep ``species_u`` as the vertex set. Both orientations have the
    same persistence diagrams, so only cost differs.
    """
    cross = cross_distances(cloud, species_u, species_v)
    if cross.shape[1] < cross.shape[0]:
        cross = cross.T
    return dowker(cross, max_value)


def witness_counts(tri: Triangulation, landmarks, witnesses) -> dict:
    """Number of witnesses of every simplex of the landmark triangulation.

    A point witnesses a simplex when its distance to each simplex vertex is at
    most its distance to every landmark outside the simplex (ties witness).
    A simplex containing every landmark is witnessed by every point.
    """
    L = np.asarray(landmarks, dtype=float).reshape(-1, 2)
    W = np.asarray(witnesses, dtype=float).reshape(-1, 2)
    simplices = tri.simplices()
    counts = {s: 0 for s in simplices}
    if len(W) == 0:
        return counts
    D = np.sqrt(((W[:, None, :] - L[None, :, :]) ** 2).sum(-1))
    k = min(MAX_DIM + 2, len(L))
    near = np.argsort(D, axis=1, kind="stable")[:, :k]
    near_d = np.take_along_axis(D, near, axis=1)
    for size in (1, 2, 3):
        group = [s for s in simplices if len(s) == size]
        if not group:
            continue
        S = np.array(group, dtype=np.int64)                 # (F, size)
        far = D[:, S].max(axis=2)                           # (W, F)
        member = (near[:, None, :, None] == S[None, :, None, :]).any(-1)  # (W, F, k)
        # no landmark left outside the simplex gives inf: vacuously witnessed
        comp = np.where(member, np.inf, near_d[:, None, :]).min(-1)
        hits = (far <= comp).sum(axis=0)
        for s, h in zip(group, hits.tolist()):
            counts[s] = int(h)
    return counts


def witness_filtration(tri: Triangulation, landmarks, witnesses, species=None,
                       empty: str = "error") -> FilteredComplex:
    """Filter the landmark triangulation by normalized inverted witness counts.

    Raw value of a simplex is (mu_max - mu) / mu_max with mu_max global over
    all simplex dimensions; each simplex then takes the minimum over itself
    and its cofaces so that faces never enter after cofaces.

    ``empty="saturate"`` maps a witness set with no hits to the constant
    filtration at 1 instead of raising.
    """
    counts = witness_counts(tri, landmarks, witnesses)
    return filtration_from_counts(counts, species, empty)


def filtration_from_counts(counts: dict, species=None, empty: str = "error") -> FilteredComplex:
    """Witness filtration from per-simplex witness counts (see ``witness_filtration``)."""
    mu_max = max(counts.values(), default=0)
    if mu_max == 0:
        if empty != "saturate":
            raise ZeroWitnessError(species)
        raw = {s: 1.0 for s in counts}
    else:
        raw = {s: (mu_max - c) / mu_max for s, c in counts.items()}
    value = dict(raw)
    for s in sorted(raw, key=len, reverse=True):
        if len(s) > 1:
            for face in combinations(s, len(s) - 1):
                if value[s] < value[face]:
                    value[face] = value[s]
    return FilteredComplex.from_unsorted(list(value), list(value.values()))
