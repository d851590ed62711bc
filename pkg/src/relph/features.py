"""Feature vectors: Dowker/VR persistence images, witness distance vectors, simple descriptors."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import EmptySubcloudError, RelphError
from .filtrations import dowker_pair, vietoris_rips, witness_filtration
from .geometry import LabeledPointCloud, delaunay_2d, within_distances
from .images import fit_image_spec, persistence_image
from .metrics import bottleneck, wasserstein
from .persistence import diagrams

log = logging.getLogger(__name__)

# (vertex-side species, witness-side species) as named in the feature layout
DOWKER_PAIRS = (("M", "V"), ("T", "V"), ("M", "T"))
DOWKER_BLOCKS = tuple(f"D_{u}_{v}_pd{k}" for u, v in DOWKER_PAIRS for k in (0, 1))
VR_SPECIES = ("T", "M")
VR_BLOCKS = tuple(f"VR_{s}_pd{k}" for s in VR_SPECIES for k in (0, 1))
WITNESS_SPECIES = {1: ("T", "N", "M"), 2: ("T", "N", "M1", "M2")}
SIMPLE_NAMES = ("count_T", "count_M", "count_N", "dist_T_V", "dist_N_V", "dist_M_V")


@dataclass(frozen=True)
class ImageFeatures:
    """Concatenated persistence images in a fixed block order."""

    vector: np.ndarray
    blocks: tuple
    diagrams: dict = field(repr=False, compare=False, default=None)

    @property
    def names(self) -> list:
        per = len(self.vector) // len(self.blocks)
        return [f"{b}_{i:03d}" for b in self.blocks for i in range(per)]


@dataclass(frozen=True)
class WitnessDistanceVector:
    version: int
    vector: np.ndarray
    names: tuple
    diagrams: dict = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class SimpleDescriptor:
    vector: np.ndarray
    names: tuple = SIMPLE_NAMES


def dowker_diagrams(cloud: LabeledPointCloud, max_value: float = math.inf) -> dict:
    """The six Dowker diagrams keyed by block name (M-V, T-V, M-T; dims 0, 1)."""
    out = {}
    for u, v in DOWKER_PAIRS:
        pd0, pd1 = diagrams(dowker_pair(cloud, u, v, max_value))
        out[f"D_{u}_{v}_pd0"] = pd0
        out[f"D_{u}_{v}_pd1"] = pd1
    return out


def vr_diagrams(cloud: LabeledPointCloud, max_value: float) -> dict:
    """Rips diagrams of tumor cells and of macrophages, truncated at ``max_value``."""
    out = {}
    for s in VR_SPECIES:
        pd0, pd1 = diagrams(vietoris_rips(within_distances(cloud, s), max_value))
        out[f"VR_{s}_pd0"] = pd0
        out[f"VR_{s}_pd1"] = pd1
    return out


def fit_specs(corpus: list, blocks, resolution=(20, 20), sigma: float = 1.0) -> dict:
    """One image spec per block, fitted on the diagrams of a whole corpus."""
    return {b: fit_image_spec([d[b] for d in corpus], resolution, sigma) for b in blocks}


def vectorize(diags: dict, specs: dict, blocks) -> ImageFeatures:
    parts = [persistence_image(diags[b], specs[b]).flat for b in blocks]
    vec = np.concatenate(parts)
    assert len(vec) == sum(specs[b].size for b in blocks)
    return ImageFeatures(vec, tuple(blocks), diags)


def dowker_features(cloud: LabeledPointCloud, specs: dict | None = None,
                    max_value: float = math.inf) -> ImageFeatures:
    """2400-dim Dowker feature vector.

    Without ``specs`` the image ranges are fitted on this cloud alone, which
    is fine for inspection but not comparable across clouds.
    """
    diags = dowker_diagrams(cloud, max_value)
    if specs is None:
        specs = fit_specs([diags], DOWKER_BLOCKS)
    feats = vectorize(diags, specs, DOWKER_BLOCKS)
    assert len(feats.vector) == 6 * specs[DOWKER_BLOCKS[0]].size
    return feats


def vr_features(cloud: LabeledPointCloud, specs: dict | None = None,
                max_value: float = math.inf) -> ImageFeatures:
    diags = vr_diagrams(cloud, max_value)
    if specs is None:
        specs = fit_specs([diags], VR_BLOCKS)
    feats = vectorize(diags, specs, VR_BLOCKS)
    assert len(feats.vector) == 4 * specs[VR_BLOCKS[0]].size
    return feats


def witness_species_points(cloud: LabeledPointCloud, version: int) -> dict:
    if version not in WITNESS_SPECIES:
        raise RelphError(f"witness vector version must be 1 or 2, got {version}")
    if version == 1:
        return {s: cloud.subcloud(s, required=False) for s in WITNESS_SPECIES[1]}
    m1, m2 = cloud.macrophage_phenotypes()
    return {"T": cloud.subcloud("T", required=False),
            "N": cloud.subcloud("N", required=False), "M1": m1, "M2": m2}


def witness_diagrams(cloud: LabeledPointCloud, version: int = 1, empty: str = "error",
                     landmark: str = "V") -> dict:
    """(PD0, PD1) of the witness filtration of each witness species on the vessel triangulation."""
    landmarks = cloud.subcloud(landmark)
    tri = delaunay_2d(landmarks)
    out = {}
    for s, pts in witness_species_points(cloud, version).items():
        if len(pts) == 0 and empty != "saturate":
            raise EmptySubcloudError(s)
        out[s] = diagrams(witness_filtration(tri, landmarks, pts, species=s, empty=empty))
    return out


def witness_entry_names(version: int) -> tuple:
    pairs = list(combinations(WITNESS_SPECIES[version], 2))
    return tuple(f"{m}_pd{k}_{a}_{b}" for k in (0, 1) for m in ("dB", "dW") for a, b in pairs)


def witness_vector(cloud: LabeledPointCloud, version: int = 1, empty: str = "error") -> WitnessDistanceVector:
    """Pairwise bottleneck and 1-Wasserstein distances between witness diagrams.

    Layout: for dimension 0 then 1, all bottleneck entries then all
    Wasserstein entries, species pairs in combinations order of
    (T, N, M) or (T, N, M1, M2). Length 2 m (m - 1).
    """
    diags = witness_diagrams(cloud, version, empty)
    species = WITNESS_SPECIES[version]
    pairs = list(combinations(species, 2))
    vec = []
    for k in (0, 1):
        for metric in (bottleneck, wasserstein):
            for a, b in pairs:
                vec.append(metric(diags[a][k], diags[b][k]))
    vec = np.array(vec)
    m = len(species)
    assert len(vec) == 2 * m * (m - 1)
    if not np.isfinite(vec).all():
        raise RelphError("essential classes differ between witness filtrations")
    return WitnessDistanceVector(version, vec, witness_entry_names(version), diags)


def simple_descriptor(cloud: LabeledPointCloud) -> SimpleDescriptor:
    """Counts of T, M, N and their mean distance to the nearest vessel."""
    vessels = cloud.subcloud("V")
    counts, dists = [], []
    for s in ("T", "M", "N"):
        counts.append(float(cloud.count(s)))
    for s in ("T", "N", "M"):
        pts = cloud.subcloud(s, required=False)
        if len(pts) == 0:
            log.warning("no %s points in %s; nearest-vessel distance set to 0", s, cloud.name or "cloud")
            dists.append(0.0)
            continue
        d = np.sqrt(((pts[:, None, :] - vessels[None, :, :]) ** 2).sum(-1)).min(axis=1)
        dists.append(float(d.mean()))
    return SimpleDescriptor(np.array(counts + dists))
