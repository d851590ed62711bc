"""Phenomenological generator of labeled tumour-microenvironment point clouds.

This is not an agent-based simulation. It draws point patterns with known
ground truth that mimic the three qualitative end states (elimination,
equilibrium, escape) and, separately, clouds whose dominant macrophage
phenotype leaves a spatial trace (tumour cells colonising vessels).

Random streams: vessels use ``SeedSequence([seed, 0])`` and everything else
``SeedSequence([seed, 1])``, so vessel positions at a fixed seed do not
depend on the regime.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import RelphError
from .geometry import LabeledPointCloud

REGIMES = ("elimination", "equilibrium", "escape")

# 9 x 9 knob grid; chi is the macrophage chemotactic sensitivity, c_half
# the extravasation half-saturation constant
CHI_VALUES = tuple(float(v) for v in np.linspace(0.0, 8.0, 9))
C_HALF_VALUES = tuple(round(float(v), 10) for v in np.linspace(0.0, 0.8, 9))
CHI_SPLIT = 2.5         # chi below: equilibrium
C_HALF_SPLIT = 0.45     # c_half above (and chi above CHI_SPLIT): escape
BOUNDARY_KEEP = 0.6     # probability a boundary cell keeps its own regime

DEFAULT_COUNTS = {
    "elimination": {"V": 50, "T": 0, "N": 60, "M": 200},
    "equilibrium": {"V": 50, "T": 250, "N": 60, "M": 150},
    "escape": {"V": 50, "T": 200, "N": 50, "M": 180},
}


@dataclass(frozen=True)
class RegimeParams:
    regime: str | None = None
    chi: float | None = None
    c_half: float | None = None
    counts: dict = field(default_factory=dict)
    domain: float = 100.0
    seed: int = 0

    def __post_init__(self):
        if self.regime is None and (self.chi is None or self.c_half is None):
            raise RelphError("give a regime or both knobs (chi, c_half)")
        if self.regime is not None and self.regime not in REGIMES:
            raise RelphError(f"unknown regime {self.regime!r}")
        if not self.domain > 0:
            raise RelphError("domain side must be positive")
        for s, c in self.counts.items():
            if int(c) != c or c < 0:
                raise RelphError(f"invalid count {c!r} for species {s!r}")
            if c > 600:
                raise RelphError(f"count {c} for {s!r} exceeds desk-scale limit 600")


# -- knob grid -----------------------------------------------------------------

def designed_regime(chi: float, c_half: float) -> str:
    if chi < CHI_SPLIT:
        return "equilibrium"
    return "escape" if c_half > C_HALF_SPLIT else "elimination"


def _neighbour_regimes(i: int, j: int) -> list:
    own = designed_regime(CHI_VALUES[i], C_HALF_VALUES[j])
    out = []
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        a, b = i + di, j + dj
        if 0 <= a < len(CHI_VALUES) and 0 <= b < len(C_HALF_VALUES):
            r = designed_regime(CHI_VALUES[a], C_HALF_VALUES[b])
            if r != own and r not in out:
                out.append(r)
    return out


def is_boundary_cell(i: int, j: int) -> bool:
    """Grid cell (chi index i, c_half index j) touches another designed region."""
    return bool(_neighbour_regimes(i, j))


def sample_regime(i: int, j: int, rng: np.random.Generator) -> str:
    """Interior cells are deterministic; boundary cells mix with their neighbours."""
    own = designed_regime(CHI_VALUES[i], C_HALF_VALUES[j])
    others = _neighbour_regimes(i, j)
    if not others or rng.random() < BOUNDARY_KEEP:
        return own
    return others[int(rng.integers(len(others)))]


def grid_params(n_seeds: int = 20, domain: float = 100.0, base_seed: int = 0) -> list:
    """RegimeParams for every (chi, c_half, realization) cell, row-major in (i, j, s)."""
    out = []
    for i, chi in enumerate(CHI_VALUES):
        for j, ch in enumerate(C_HALF_VALUES):
            for s in range(n_seeds):
                seed = base_seed + (i * len(C_HALF_VALUES) + j) * 1000 + s
                out.append(RegimeParams(chi=chi, c_half=ch, domain=domain, seed=seed))
    return out


def knob_index(params: RegimeParams) -> tuple:
    return CHI_VALUES.index(params.chi), C_HALF_VALUES.index(params.c_half)


def resolve_regime(params: RegimeParams) -> str:
    if params.regime is not None:
        return params.regime
    if params.chi in CHI_VALUES and params.c_half in C_HALF_VALUES:
        i, j = knob_index(params)
        rng = np.random.default_rng(np.random.SeedSequence([params.seed, 2]))
        return sample_regime(i, j, rng)
    return designed_regime(params.chi, params.c_half)


# -- sampling helpers ---------------------------------------------------------------

def _reflect(p: np.ndarray, L: float) -> np.ndarray:
    p = np.abs(p)
    p = np.where(p > L, 2 * L - p, p)
    return np.clip(p, 0.0, L)


def _disk(rng, n, center, r_lo, r_hi):
    ang = rng.uniform(0, 2 * np.pi, n)
    rad = np.sqrt(rng.uniform(r_lo ** 2, r_hi ** 2, n))
    return np.asarray(center) + np.c_[rad * np.cos(ang), rad * np.sin(ang)]


def _around(rng, n, centers, sd):
    centers = np.asarray(centers).reshape(-1, 2)
    pick = centers[rng.integers(0, len(centers), n)]
    return pick + rng.normal(0.0, sd, (n, 2))


def vessels(seed: int, n: int = 50, domain: float = 100.0) -> np.ndarray:
    """Vessel positions in a thick ring near the domain edge."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    c = np.full(2, domain / 2)
    return _reflect(_disk(rng, n, c, 0.30 * domain, 0.48 * domain), domain)


def _omega(rng, n, m2_fraction):
    is_m2 = rng.random(n) < m2_fraction
    om = np.where(is_m2, rng.uniform(0.5, 1.0, n), rng.uniform(0.0, 0.5, n))
    return om


def _assemble(parts: dict, omega: np.ndarray, domain: float, name: str) -> LabeledPointCloud:
    pts, labels, om = [], [], []
    for s in ("V", "T", "N"):
        p = parts.get(s, np.zeros((0, 2)))
        pts.append(p)
        labels += [s] * len(p)
        om.append(np.full(len(p), np.nan))
    m = parts.get("M", np.zeros((0, 2)))
    pts.append(m)
    labels += ["M1" if w < 0.5 else "M2" for w in omega]
    om.append(omega)
    P = np.vstack(pts)
    P = _reflect(P, domain)
    return LabeledPointCloud(P, tuple(labels), np.concatenate(om), name=name)


def _count(rng, mean, scale=0.15):
    if mean == 0:
        return 0
    return int(np.clip(round(rng.normal(mean, scale * mean)), 1, 600))


def generate(params: RegimeParams) -> LabeledPointCloud:
    """One cloud in the regime of ``params`` (sampled from the knob grid if no regime)."""
    regime = resolve_regime(params)
    L = params.domain
    counts = {**DEFAULT_COUNTS[regime], **params.counts}
    rng = np.random.default_rng(np.random.SeedSequence([params.seed, 1]))
    V = vessels(params.seed, counts["V"], L)
    c = np.full(2, L / 2) + rng.normal(0, 0.02 * L, 2)
    chi = params.chi if params.chi is not None else {"equilibrium": 1.0, "escape": 6.0,
                                                     "elimination": 6.0}[regime]
    c_half = params.c_half if params.c_half is not None else {"equilibrium": 0.4, "escape": 0.7,
                                                              "elimination": 0.2}[regime]
    nT = _count(rng, counts["T"])
    nN = _count(rng, counts["N"])
    # stronger chemotaxis recruits more macrophages
    nM = _count(rng, counts["M"] * (0.85 + 0.04 * chi))
    parts = {"V": V}
    if regime == "elimination":
        parts["T"] = np.zeros((0, 2))
        parts["N"] = _disk(rng, nN, c, 0.0, 0.15 * L)
        m2f = 0.05 + 0.1 * c_half
        n2 = rng.binomial(nM, m2f)
        M1 = _disk(rng, nM - n2, c, 0.0, 0.30 * L)
        M2 = _around(rng, n2, V, 0.03 * L)
        parts["M"] = np.vstack([M1, M2])
        omega = np.r_[rng.uniform(0, 0.5, nM - n2), rng.uniform(0.5, 1, n2)]
    elif regime == "equilibrium":
        r_t = 0.12 * L * rng.uniform(0.9, 1.1)
        parts["T"] = _disk(rng, nT, c, 0.0, r_t)
        parts["N"] = _disk(rng, nN, c, 0.0, 0.4 * r_t)
        m2f = 0.1 + 0.1 * c_half
        n2 = rng.binomial(nM, m2f)
        M1 = _disk(rng, nM - n2, c, r_t + 0.01 * L, r_t + 0.08 * L)
        M2 = _around(rng, n2, V, 0.03 * L)
        parts["M"] = np.vstack([M1, M2])
        omega = np.r_[rng.uniform(0, 0.5, nM - n2), rng.uniform(0.5, 1, n2)]
    else:
        k = int(rng.integers(4, 7))
        niches = V[rng.choice(len(V), k, replace=False)]
        parts["T"] = _around(rng, nT, niches, 0.03 * L)
        parts["N"] = _disk(rng, nN, c, 0.0, 0.08 * L)
        m2f = 0.55 + 0.3 * min(c_half, 0.8)
        n2 = rng.binomial(nM, m2f)
        near = rng.random(n2) < 0.7
        M2 = np.vstack([_around(rng, int(near.sum()), niches, 0.04 * L),
                        _around(rng, int((~near).sum()), V, 0.03 * L)])
        M1 = _disk(rng, nM - n2, c, 0.0, 0.35 * L)
        parts["M"] = np.vstack([M2, M1])
        omega = np.r_[rng.uniform(0.5, 1, n2), rng.uniform(0, 0.5, nM - n2)]
    return _assemble(parts, omega, L, name=f"{regime}-s{params.seed}")


# -- phenotype corpus ------------------------------------------------------------------

def generate_phenotype(seed: int, domain: float = 100.0, n_vessels: int = 40) -> LabeledPointCloud:
    """Cloud whose M2 share drives how many tumour satellites sit on vessels.

    The M2 share f ~ Beta(2, 3.5) sets each macrophage's phenotype; each of
    the tumour satellites colonises a vessel with probability
    1 / (1 + exp(-8 (f - 0.5))) and otherwise sits away from vessels. Macrophage positions ignore phenotype, and the
    tumour mass position and size vary independently of f.
    """
    L = domain
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    V = vessels(seed, n_vessels, L)
    f = rng.beta(2.0, 3.5)
    c = np.full(2, L / 2) + rng.uniform(-0.08 * L, 0.08 * L, 2)
    r_t = rng.uniform(0.08 * L, 0.18 * L)
    n_mass = int(rng.integers(100, 181))
    T = [_disk(rng, n_mass, c, 0.0, r_t)]
    n_sat = 8
    p_vessel = 1.0 / (1.0 + np.exp(-8.0 * (f - 0.5)))
    for _ in range(n_sat):
        size = int(rng.integers(3, 7))
        if rng.random() < p_vessel:
            centre = V[rng.integers(len(V))] + rng.normal(0, 0.01 * L, 2)
        else:
            centre = _away_from(rng, V, c, r_t, L)
        T.append(centre + rng.normal(0, 0.015 * L, (size, 2)))
    T = np.vstack(T)
    nN = int(rng.integers(20, 50))
    N = _disk(rng, nN, c, 0.0, 0.5 * r_t)
    nM = int(rng.integers(40, 81))
    near_mass = rng.random(nM) < 0.5
    M = np.vstack([_disk(rng, int(near_mass.sum()), c, r_t, r_t + 0.1 * L),
                   _around(rng, int((~near_mass).sum()), V, 0.04 * L)])
    omega = _omega(rng, nM, f)
    return _assemble({"V": V, "T": T, "N": N, "M": M}, omega, L, name=f"phenotype-s{seed}")


def _away_from(rng, V, c, r_t, L, min_gap=0.08):
    for _ in range(1000):
        p = _disk(rng, 1, c, r_t + 0.05 * L, 0.45 * L)[0]
        if np.sqrt(((V - p) ** 2).sum(1)).min() >= min_gap * L and (p >= 0).all() and (p <= L).all():
            return p
    return p


def phenotype_label(cloud: LabeledPointCloud) -> int:
    """1 when M2 macrophages are the strict majority, else 0 (M1 dominant)."""
    om = cloud.omega[cloud.mask("M")]
    om = om[~np.isnan(om)]
    if len(om) == 0:
        raise RelphError("no phenotyped macrophages")
    return int((om < 0.5).mean() < 0.5)
