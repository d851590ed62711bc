"""End-to-end pipelines: regime clustering from witness vectors, phenotype classification."""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import datagen as dg
from .features import (DOWKER_BLOCKS, VR_BLOCKS, dowker_diagrams, fit_specs, simple_descriptor,
                       vectorize, vr_diagrams, witness_vector)
from .ml import cluster_purity, evaluate_classifier, kmeans, relabel_noise

PHENOTYPE_MODELS = ("dowker", "D_T_V_pd0", "vr", "simple")
VR_MAX_VALUE = 8.0


def pmap(fn, items, jobs: int = 1) -> list:
    """Order-preserving map, in a process pool when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def prepare_cloud(params: dg.RegimeParams, relabel: float = 0.0):
    cloud = dg.generate(params)
    if relabel > 0:
        cloud = relabel_noise(cloud, relabel, seed=params.seed)
    return cloud


def _witness_row(task):
    params, version, relabel = task
    return witness_vector(prepare_cloud(params, relabel), version, empty="saturate").vector


def regime_features(params_list, version: int, relabel: float = 0.0, jobs: int = 1) -> np.ndarray:
    rows = pmap(_witness_row, [(p, version, relabel) for p in params_list], jobs)
    return np.vstack(rows)


def cluster_grid(X: np.ndarray, params_list, k: int, seed: int = 0) -> dict:
    """k-means on grid features plus per-cell modal cluster and purity.

    Clusters are named after the designed regime most common among their
    interior-cell members; agreement compares that name with each interior
    cell's designed regime.
    """
    res = kmeans(X, k, seed=seed)
    a = res.assignments
    cells = [dg.knob_index(p) for p in params_list]
    designed = [dg.designed_regime(p.chi, p.c_half) for p in params_list]
    interior = [not dg.is_boundary_cell(*c) for c in cells]
    naming = {}
    for j in range(k):
        votes = Counter(d for d, aj, inn in zip(designed, a.tolist(), interior) if aj == j and inn)
        naming[j] = min(votes.items(), key=lambda kv: (-kv[1], kv[0]))[0] if votes else "none"
    purity = cluster_purity(a, cells)
    out_cells, agree, pur = [], [], []
    for (i, jj), (modal, p) in sorted(purity.items()):
        is_int = not dg.is_boundary_cell(i, jj)
        des = dg.designed_regime(dg.CHI_VALUES[i], dg.C_HALF_VALUES[jj])
        out_cells.append({"i": i, "j": jj, "chi": dg.CHI_VALUES[i], "c_half": dg.C_HALF_VALUES[jj],
                          "boundary": not is_int, "designed": des, "modal_cluster": int(modal),
                          "modal_regime": naming[int(modal)], "purity": p})
        if is_int:
            agree.append(naming[int(modal)] == des)
            pur.append(p)
    return {
        "k": k,
        "inertia": res.inertia,
        "cluster_regime": {str(j): naming[j] for j in range(k)},
        "assignments": a.tolist(),
        "cells": out_cells,
        "interior_agreement": float(np.mean(agree)),
        "interior_mean_purity": float(np.mean(pur)),
        "n_interior_cells": len(agree),
    }


def regime_pipeline(n_seeds: int = 20, version: int = 1, relabel: float = 0.0, ks=(3,),
                    base_seed: int = 0, jobs: int = 1, X: np.ndarray | None = None) -> dict:
    params = dg.grid_params(n_seeds, base_seed=base_seed)
    if X is None:
        X = regime_features(params, version, relabel, jobs)
    out = {"version": version, "relabel": relabel, "n_seeds": n_seeds, "base_seed": base_seed,
           "n_clouds": len(params), "clusterings": {}}
    for k in ks:
        out["clusterings"][str(k)] = cluster_grid(X, params, k, seed=base_seed)
    return out


def _phenotype_diagrams(seed):
    cloud = dg.generate_phenotype(seed)
    return (dg.phenotype_label(cloud), dowker_diagrams(cloud), vr_diagrams(cloud, VR_MAX_VALUE),
            simple_descriptor(cloud).vector)


def phenotype_pipeline(n: int = 240, base_seed: int = 0, n_splits: int = 10, jobs: int = 1,
                       models=PHENOTYPE_MODELS) -> dict:
    """SVM accuracy distributions of several feature sets on the phenotype corpus."""
    rows = pmap(_phenotype_diagrams, range(base_seed, base_seed + n), jobs)
    y = np.array([r[0] for r in rows])
    dspec = fit_specs([r[1] for r in rows], DOWKER_BLOCKS)
    vspec = fit_specs([r[2] for r in rows], VR_BLOCKS)
    sets = {}
    for m in models:
        if m == "dowker":
            sets[m] = np.array([vectorize(r[1], dspec, DOWKER_BLOCKS).vector for r in rows])
        elif m in DOWKER_BLOCKS:
            sets[m] = np.array([vectorize(r[1], dspec, (m,)).vector for r in rows])
        elif m == "vr":
            sets[m] = np.array([vectorize(r[2], vspec, VR_BLOCKS).vector for r in rows])
        elif m in VR_BLOCKS:
            sets[m] = np.array([vectorize(r[2], vspec, (m,)).vector for r in rows])
        elif m == "simple":
            sets[m] = np.array([r[3] for r in rows])
        else:
            raise ValueError(f"unknown model {m!r}")
    results = {}
    for m, X in sets.items():
        r = evaluate_classifier(X, y, n_splits=n_splits)
        r["n_features"] = int(X.shape[1])
        results[m] = r
    return {"n": n, "base_seed": base_seed, "n_label1": int(y.sum()), "n_label0": int(n - y.sum()),
            "vr_max_value": VR_MAX_VALUE,
            "image_specs": {b: s.to_json() for b, s in {**dspec, **vspec}.items()},
            "models": results}
