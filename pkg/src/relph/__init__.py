"""Relational persistent homology for multispecies point clouds."""
from .errors import RelphError
from .geometry import LabeledPointCloud, cross_distances, delaunay_2d, within_distances
from .filtrations import FilteredComplex, dowker, dowker_pair, vietoris_rips, witness_filtration
from .persistence import PersistenceDiagram, diagrams
from .metrics import bottleneck, wasserstein
from .images import ImageSpec, persistence_image
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "FilteredComplex", "ImageSpec", "LabeledPointCloud", "PersistenceDiagram", "RelphError",
    "bottleneck", "cross_distances", "delaunay_2d", "diagrams", "dowker", "dowker_pair",
    "persistence_image", "vietoris_rips", "wasserstein", "witness_filtration", "within_distances",
]
