"""Labeled point clouds, distance matrices and planar Delaunay triangulation."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateGeometryError,
    DuplicatePointError,
    EmptySubcloudError,
    IdenticalSpeciesError,
    RelphError,
    UnknownSpeciesError,
)

SPECIES = ("V", "T", "N", "M", "M1", "M2", "S")
MACROPHAGE_LABELS = ("M", "M1", "M2")

# Composite selectors: "M" means every macrophage regardless of phenotype.
_ALIASES = {"M": ("M", "M1", "M2")}

INCIRCLE_EPS = 1e-12


@dataclass(frozen=True)
class LabeledPointCloud:
    """Points in the plane, each carrying one species tag.

    ``omega`` holds the macrophage phenotype in [0, 1]; it is NaN for every
    point that is not a macrophage (and may be NaN for unphenotyped ``M``).
    """

    points: np.ndarray
    labels: tuple
    omega: np.ndarray = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, 2)
        labels = tuple(str(s) for s in self.labels)
        if len(labels) != len(pts):
            raise RelphError(f"{len(labels)} labels for {len(pts)} points")
        bad = sorted(set(labels) - set(SPECIES))
        if bad:
            raise UnknownSpeciesError(f"unknown species tag(s): {bad}")
        if self.omega is None:
            om = np.full(len(pts), np.nan)
        else:
            om = np.asarray(self.omega, dtype=float).reshape(-1)
            if len(om) != len(pts):
                raise RelphError("omega must have one entry per point")
        has = ~np.isnan(om)
        lab = np.asarray(labels, dtype=object)
        if has.any():
            if not np.isin(lab[has], MACROPHAGE_LABELS).all():
                raise RelphError("phenotype given for a non-macrophage point")
            if (om[has] < 0).any() or (om[has] > 1).any():
                raise RelphError("phenotype outside [0, 1]")
        if not np.isfinite(pts).all():
            raise RelphError("non-finite coordinates")
        for s in set(labels):
            sub = pts[lab == s]
            if len(np.unique(sub, axis=0)) != len(sub):
                raise DuplicatePointError(f"duplicate points in species {s!r}")
        pts.setflags(write=False)
        om.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "omega", om)

    def __len__(self):
        return len(self.labels)

    def mask(self, species: str | Iterable[str]) -> np.ndarray:
        if isinstance(species, str):
            tags = _ALIASES.get(species, (species,))
        else:
            tags = tuple(t for s in species for t in _ALIASES.get(s, (s,)))
        return np.isin(np.asarray(self.labels, dtype=object), tags)

    def subcloud(self, species, required: bool = True) -> np.ndarray:
        """Coordinates of the points of ``species`` (``"M"`` selects all macrophages)."""
        sub = self.points[self.mask(species)]
        if required and len(sub) == 0:
            raise EmptySubcloudError(species)
        return sub

    def count(self, species) -> int:
        return int(self.mask(species).sum())

    def macrophage_phenotypes(self) -> tuple[np.ndarray, np.ndarray]:
        """Split macrophages into (M1, M2) coordinates.

        Explicit M1/M2 tags win; untagged ``M`` points are split by omega
        (M1 below 0.5). Untagged macrophages without omega cannot be split.
        """
        lab = np.asarray(self.labels, dtype=object)
        generic = lab == "M"
        if generic.any() and np.isnan(self.omega[generic]).any():
            raise RelphError("macrophages labeled 'M' without phenotype cannot be split")
        m1 = (lab == "M1") | (generic & (self.omega < 0.5))
        m2 = (lab == "M2") | (generic & (self.omega >= 0.5))
        return self.points[m1], self.points[m2]

    def with_labels(self, labels: Sequence[str], omega=None) -> "LabeledPointCloud":
        return LabeledPointCloud(self.points, tuple(labels),
                                 self.omega if omega is None else omega, name=self.name)


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1))


def within_distances(cloud: LabeledPointCloud, species: str) -> np.ndarray:
    """Symmetric Euclidean distance matrix of one species, zero diagonal."""
    sub = cloud.subcloud(species)
    d = _pairwise(sub, sub)
    # exact symmetry and zero diagonal regardless of rounding
    d = np.triu(d, 1)
    return d + d.T


def cross_distances(cloud: LabeledPointCloud, species_u: str, species_v: str) -> np.ndarray:
    """|U| x |V| Euclidean distances between two species."""
    if species_u == species_v:
        raise IdenticalSpeciesError(f"cross distances need two species, got {species_u!r} twice")
    return _pairwise(cloud.subcloud(species_u), cloud.subcloud(species_v))


# ---------------------------------------------------------------------------
# Delaunay triangulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Triangulation:
    points: np.ndarray
    triangles: tuple  # CCW index triples

    @property
    def edges(self) -> list[tuple[int, int]]:
        es = set()
        for tri in self.triangles:
            for a, b in combinations(sorted(tri), 2):
                es.add((a, b))
        return sorted(es)

    @property
    def vertices(self) -> list[int]:
        return sorted({v for tri in self.triangles for v in tri})

    def simplices(self) -> list[tuple]:
        """Every vertex, edge and triangle as sorted index tuples."""
        out = [(v,) for v in self.vertices]
        out += self.edges
        out += sorted(tuple(sorted(t)) for t in self.triangles)
        return out

    def area(self) -> float:
        p = self.points
        return float(sum(abs(orient(p[a], p[b], p[c])) / 2 for a, b, c in self.triangles))


def orient(a, b, c) -> float:
    """Twice the signed area of (a, b, c); positive when counter-clockwise."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def incircle(a, b, c, d) -> float:
    """Normalized in-circle determinant; > 0 when d is inside the CCW circle abc.

    Coordinates are shifted to ``d`` and scaled by the largest offset so the
    determinant is O(1) and a fixed absolute epsilon is meaningful.
    """
    ax, ay = a[0] - d[0], a[1] - d[1]
    bx, by = b[0] - d[0], b[1] - d[1]
    cx, cy = c[0] - d[0], c[1] - d[1]
    s = max(abs(ax), abs(ay), abs(bx), abs(by), abs(cx), abs(cy))
    if s == 0:
        return 0.0
    ax, ay, bx, by, cx, cy = ax / s, ay / s, bx / s, by / s, cx / s, cy / s
    return ((ax * ax + ay * ay) * (bx * cy - cx * by)
            - (bx * bx + by * by) * (ax * cy - cx * ay)
            + (cx * cx + cy * cy) * (ax * by - bx * ay))


def _orient_normalized(a, b, p) -> float:
    s = max(abs(b[0] - a[0]), abs(b[1] - a[1]), abs(p[0] - a[0]), abs(p[1] - a[1]))
    return orient(a, b, p) / (s * s) if s else 0.0


def convex_hull_area(points: np.ndarray) -> float:
    pts = sorted(map(tuple, np.asarray(points, dtype=float)))
    if len(pts) < 3:
        return 0.0

    def half(seq):
        h = []
        for p in seq:
            while len(h) >= 2 and orient(h[-2], h[-1], p) <= 0:
                h.pop()
            h.append(p)
        return h

    hull = half(pts)[:-1] + half(pts[::-1])[:-1]
    x = np.array([p[0] for p in hull])
    y = np.array([p[1] for p in hull])
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2)


_GHOST = -1


def delaunay_2d(points) -> Triangulation:
    """Bowyer-Watson triangulation of planar points.

    The unbounded outside is represented by ghost triangles through a vertex
    at infinity rather than a finite super-triangle, so hull triangles are
    never lost. Cocircular configurations are canonicalized afterwards: every
    maximal group of cocircular triangles is re-triangulated as a fan from
    its smallest vertex index, which selects the lexicographically smallest
    diagonals.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise DegenerateGeometryError(f"need at least 3 points, got {n}")
    if len(np.unique(pts, axis=0)) != n:
        raise DuplicatePointError("duplicate points in triangulation input")
    P = [tuple(p) for p in pts.tolist()]

    k = next((k for k in range(2, n) if abs(_orient_normalized(P[0], P[1], P[k])) > INCIRCLE_EPS), None)
    if k is None:
        raise DegenerateGeometryError("all points are collinear")
    a, b, c = (0, 1, k) if orient(P[0], P[1], P[k]) > 0 else (0, k, 1)
    tris = {(a, b, c), (b, a, _GHOST), (c, b, _GHOST), (a, c, _GHOST)}

    def bad(tri, p):
        u, v, w = tri
        if w != _GHOST:
            return incircle(P[u], P[v], P[w], p) > INCIRCLE_EPS
        # ghost (u, v, inf): outside half-plane of hull edge u->v
        o = _orient_normalized(P[u], P[v], p)
        if o > INCIRCLE_EPS:
            return True
        if o < -INCIRCLE_EPS:
            return False
        # on the hull line: inside only when strictly within the segment
        du = (p[0] - P[u][0]) * (P[v][0] - P[u][0]) + (p[1] - P[u][1]) * (P[v][1] - P[u][1])
        dv = (p[0] - P[v][0]) * (P[u][0] - P[v][0]) + (p[1] - P[v][1]) * (P[u][1] - P[v][1])
        return du > 0 and dv > 0

    for i in range(n):
        if i in (a, b, c):
            continue
        p = P[i]
        cavity = [t for t in tris if bad(t, p)]
        edge_count: dict = {}
        for t in cavity:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = frozenset(e)
                edge_count[key] = edge_count.get(key, 0) + 1
        for t in cavity:
            tris.discard(t)
        for t in cavity:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                if edge_count[frozenset(e)] != 1:
                    continue
                u, v = e
                if u == _GHOST:
                    tris.add((v, i, _GHOST))
                elif v == _GHOST:
                    tris.add((i, u, _GHOST))
                else:
                    tris.add((u, v, i))
    # normalize rotation so ghosts are (u, v, -1) and real triangles start anywhere
    real = [t for t in tris if _GHOST not in t]
    real = _canonical_cocircular(P, real)
    real = sorted(_rotate_min(t) for t in real)
    return Triangulation(points=pts, triangles=tuple(real))


def _rotate_min(t):
    i = t.index(min(t))
    return t[i:] + t[:i]


def _canonical_cocircular(P, tris):
    """Re-fan every maximal cocircular group of adjacent triangles."""
    tris = [_rotate_min(t) for t in tris]
    edge_owner: dict = {}
    for idx, t in enumerate(tris):
        for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edge_owner.setdefault(frozenset(e), []).append(idx)
    parent = list(range(len(tris)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    merged = False
    for e, owners in edge_owner.items():
        if len(owners) != 2:
            continue
        t1, t2 = tris[owners[0]], tris[owners[1]]
        (opp,) = set(t2) - e
        if abs(incircle(P[t1[0]], P[t1[1]], P[t1[2]], P[opp])) <= INCIRCLE_EPS:
            parent[find(owners[0])] = find(owners[1])
            merged = True
    if not merged:
        return tris
    groups: dict = {}
    for idx in range(len(tris)):
        groups.setdefault(find(idx), []).append(tris[idx])
    out = []
    for members in groups.values():
        if len(members) == 1:
            out.extend(members)
            continue
        verts = sorted({v for t in members for v in t})
        cx = np.mean([P[v][0] for v in verts])
        cy = np.mean([P[v][1] for v in verts])
        ring = sorted(verts, key=lambda v: np.arctan2(P[v][1] - cy, P[v][0] - cx))
        start = ring.index(min(ring))
        ring = ring[start:] + ring[:start]
        for j in range(1, len(ring) - 1):
            out.append((ring[0], ring[j], ring[j + 1]))
    return out
