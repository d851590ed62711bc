"""Persistence images.

Each finite pair (b, d) becomes the point (b, p = d - b), carries weight
w(p) = min(p / p_max, 1) and spreads as an isotropic Gaussian of std
``sigma``. A pixel holds the exact integral of the weighted surface over its
rectangle (product of 1-D normal CDF differences). Row ``r`` of the grid is
the r-th persistence bin from the bottom, column ``c`` the c-th birth bin.

Per-point pixel masses are rounded to multiples of ``QUANTUM`` before they
are summed. Sums of such numbers are exact in float64 while a pixel stays
below ``2**53 * QUANTUM`` (8192), so the image of a union of diagrams is
bit-for-bit the sum of their images, in any order. The rounding moves each
pixel by at most ``QUANTUM / 2`` per point.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .errors import InvalidSpecError
from .persistence import PersistenceDiagram

WEIGHTS = ("linear",)
QUANTUM = 2.0 ** -40


@dataclass(frozen=True)
class ImageSpec:
    resolution: tuple = (20, 20)            # (rows: persistence bins, cols: birth bins)
    sigma: float = 1.0
    birth_range: tuple = (0.0, 1.0)
    persistence_range: tuple = (0.0, 1.0)
    max_persistence: float = 1.0            # p_max of the linear weight
    weight: str = "linear"

    def __post_init__(self):
        rows, cols = self.resolution
        if int(rows) != rows or int(cols) != cols or rows <= 0 or cols <= 0:
            raise InvalidSpecError(f"resolution must be positive integers, got {self.resolution}")
        if not self.sigma > 0:
            raise InvalidSpecError("sigma must be positive")
        for name in ("birth_range", "persistence_range"):
            lo, hi = getattr(self, name)
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise InvalidSpecError(f"{name} must be a nonempty finite interval")
        if not self.max_persistence > 0:
            raise InvalidSpecError("max_persistence must be positive")
        if self.weight not in WEIGHTS:
            raise InvalidSpecError(f"unknown weight {self.weight!r}")

    @property
    def size(self) -> int:
        return int(self.resolution[0] * self.resolution[1])

    def weight_of(self, persistence: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(persistence, dtype=float) / self.max_persistence, 0.0, 1.0)

    def to_json(self) -> dict:
        return {"resolution": list(self.resolution), "sigma": self.sigma,
                "birth_range": list(self.birth_range),
                "persistence_range": list(self.persistence_range),
                "max_persistence": self.max_persistence, "weight": self.weight}

    @classmethod
    def from_json(cls, obj: dict) -> "ImageSpec":
        return cls(tuple(obj["resolution"]), float(obj["sigma"]), tuple(obj["birth_range"]),
                   tuple(obj["persistence_range"]), float(obj["max_persistence"]),
                   obj.get("weight", "linear"))


@dataclass(frozen=True)
class PersistenceImage:
    grid: np.ndarray
    n_essential: int = 0            # infinite pairs left out of the image

    @property
    def flat(self) -> np.ndarray:
        return self.grid.reshape(-1)


def persistence_image(pd: PersistenceDiagram, spec: ImageSpec) -> PersistenceImage:
    rows, cols = spec.resolution
    fin = pd.finite
    n_ess = len(pd) - len(fin)
    birth = fin[:, 0]
    pers = fin[:, 1] - fin[:, 0]
    w = spec.weight_of(pers)
    keep = w > 0
    birth, pers, w = birth[keep], pers[keep], w[keep]
    if len(w) == 0:
        return PersistenceImage(np.zeros((rows, cols)), n_ess)
    bx = np.linspace(*spec.birth_range, cols + 1)
    py = np.linspace(*spec.persistence_range, rows + 1)
    cdf_b = ndtr((bx[None, :] - birth[:, None]) / spec.sigma)     # (k, cols+1)
    cdf_p = ndtr((py[None, :] - pers[:, None]) / spec.sigma)      # (k, rows+1)
    mass_b = np.diff(cdf_b, axis=1)
    mass_p = np.diff(cdf_p, axis=1) * w[:, None]
    per_point = mass_p[:, :, None] * mass_b[:, None, :]            # (k, rows, cols)
    per_point = np.round(np.maximum(per_point, 0.0) / QUANTUM) * QUANTUM
    return PersistenceImage(per_point.sum(axis=0), n_ess)


def fit_image_spec(diagrams, resolution=(20, 20), sigma: float = 1.0,
                   pad: float = 0.05) -> ImageSpec:
    """Shared image spec for a family of diagrams.

    Ranges span the corpus min/max of births and persistences padded by
    ``pad`` of their width on each side; p_max is the corpus max persistence.
    Empty or degenerate families fall back to unit ranges.
    """
    fins = [d.finite for d in diagrams]
    fin = np.concatenate(fins) if fins else np.zeros((0, 2))
    if len(fin) == 0:
        return ImageSpec(tuple(resolution), sigma)
    birth = fin[:, 0]
    pers = fin[:, 1] - fin[:, 0]

    def padded(lo, hi):
        width = hi - lo
        if width <= 0:
            width = max(abs(hi), 1.0)
        return (float(lo - pad * width), float(hi + pad * width))

    pmax = float(pers.max())
    return ImageSpec(tuple(resolution), sigma, padded(birth.min(), birth.max()),
                     padded(0.0, pmax), pmax if pmax > 0 else 1.0)


def with_ranges(spec: ImageSpec, birth_range, persistence_range) -> ImageSpec:
    return replace(spec, birth_range=tuple(birth_range), persistence_range=tuple(persistence_range))
