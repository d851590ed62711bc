"""Small, deterministic learners for the two pipelines.

Everything stochastic takes an integer seed and draws from
``numpy.random.default_rng(seed)``, so results are bit-reproducible on one
platform.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import RelphError, UnknownSpeciesError
from .geometry import LabeledPointCloud

C_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)


# -- SMOTE -------------------------------------------------------------------

def smote(X, y, target_ratio: float = 1.0, k_neighbors: int = 5, seed: int = 0):
    """Oversample the minority class until it is ``target_ratio`` x the majority.

    Each synthetic sample is x + u (x_nn - x) with x a random minority sample,
    x_nn one of its k nearest minority neighbours and u ~ U(0, 1).
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        return X.copy(), y.copy()
    minority = classes[np.argmin(counts)]
    n_min, n_maj = counts.min(), counts.max()
    n_new = int(np.ceil(target_ratio * n_maj)) - n_min
    if n_new <= 0:
        return X.copy(), y.copy()
    Xm = X[y == minority]
    if len(Xm) < k_neighbors + 1:
        raise RelphError(f"SMOTE needs at least {k_neighbors + 1} minority samples, got {len(Xm)}")
    rng = np.random.default_rng(seed)
    d2 = ((Xm[:, None, :] - Xm[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)
    nn = np.argsort(d2, axis=1, kind="stable")[:, :k_neighbors]
    base = rng.integers(0, len(Xm), n_new)
    pick = nn[base, rng.integers(0, k_neighbors, n_new)]
    u = rng.random(n_new)[:, None]
    synth = Xm[base] + u * (Xm[pick] - Xm[base])
    return np.vstack([X, synth]), np.concatenate([y, np.full(n_new, minority, dtype=y.dtype)])


# -- linear SVM ----------------------------------------------------------------

@dataclass
class LinearSVM:
    w: np.ndarray
    b: float
    classes: tuple          # (negative label, positive label)

    def decision_function(self, X) -> np.ndarray:
        return np.asarray(X, dtype=float) @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        neg, pos = self.classes
        return np.where(self.decision_function(X) >= 0, pos, neg)


def svm_train(X, y, C: float = 1.0, seed: int = 0, epochs: int = 40) -> LinearSVM:
    """Soft-margin linear SVM by stochastic subgradient descent (Pegasos steps).

    Minimizes lambda/2 |w|^2 + mean hinge loss with lambda = 1 / (C n). The
    bias is a constant input feature. Samples are visited in a fresh seeded
    permutation each epoch; the returned model averages the iterates of the
    second half of training.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = tuple(np.unique(y).tolist())
    if len(classes) != 2:
        raise RelphError(f"SVM training needs exactly two classes, got {len(classes)}")
    s = np.where(y == classes[1], 1.0, -1.0)
    n, d = X.shape
    A = np.hstack([X, np.ones((n, 1))])
    lam = 1.0 / (C * n)
    radius = 1.0 / np.sqrt(lam)
    rng = np.random.default_rng(seed)
    w = np.zeros(d + 1)
    w_sum = np.zeros(d + 1)
    n_avg = 0
    t = 0
    for epoch in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            hit = s[i] * (A[i] @ w) < 1.0
            w *= 1.0 - eta * lam
            if hit:
                w += eta * s[i] * A[i]
            norm = np.sqrt(w @ w)
            if norm > radius:
                w *= radius / norm
            if epoch >= epochs // 2:
                w_sum += w
                n_avg += 1
    w = w_sum / n_avg
    return LinearSVM(w[:-1].copy(), float(w[-1]), classes)


def svm_predict(model: LinearSVM, X) -> np.ndarray:
    return model.predict(X)


class Standardizer:
    """Per-column z-score; constant columns are only centred."""

    def fit(self, X):
        X = np.asarray(X, dtype=float)
        self.mean_ = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale_ = np.where(sd > 0, sd, 1.0)
        return self

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean_) / self.scale_


# -- splitting -------------------------------------------------------------------

def stratified_kfold(y, k: int = 5, seed: int = 0) -> list:
    """Partition indices into ``k`` folds with per-class counts within one of each other.

    Each class is shuffled and dealt round-robin; the dealing position carries
    over from one class to the next so total fold sizes also stay balanced.
    """
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    start = 0
    for cls in np.unique(y):
        idx = np.flatnonzero(y == cls)
        if len(idx) < k:
            raise RelphError(f"class {cls!r} has {len(idx)} samples, fewer than k={k}")
        idx = rng.permutation(idx)
        for r, i in enumerate(idx):
            folds[(start + r) % k].append(int(i))
        start = (start + len(idx)) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def stratified_split(y, test_fraction: float = 0.2, seed: int = 0):
    """(train, test) index arrays with per-class test size round(fraction * count)."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    train, test = [], []
    for cls in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == cls))
        n_test = int(round(test_fraction * len(idx)))
        test.extend(idx[:n_test].tolist())
        train.extend(idx[n_test:].tolist())
    return np.array(sorted(train), dtype=np.int64), np.array(sorted(test), dtype=np.int64)


def _fit_predict(Xtr, ytr, Xte, C, seed, use_smote=True, k_neighbors=5):
    scaler = Standardizer().fit(Xtr)
    A, b = scaler.transform(Xtr), ytr
    if use_smote:
        kn = min(k_neighbors, int(np.unique(ytr, return_counts=True)[1].min()) - 1)
        if kn >= 1:
            A, b = smote(A, b, k_neighbors=kn, seed=seed)
    model = svm_train(A, b, C=C, seed=seed)
    return model.predict(scaler.transform(Xte))


def select_C(X, y, C_grid=C_GRID, k: int = 5, seed: int = 0) -> tuple:
    """C with the best stratified k-fold accuracy (SMOTE inside each training fold)."""
    folds = stratified_kfold(y, k, seed)
    scores = []
    for C in C_grid:
        acc = []
        for f, test in enumerate(folds):
            train = np.setdiff1d(np.arange(len(y)), test)
            pred = _fit_predict(X[train], y[train], X[test], C, seed + f)
            acc.append(float((pred == y[test]).mean()))
        scores.append(float(np.mean(acc)))
    best = int(np.argmax(scores))
    return C_grid[best], scores


def evaluate_classifier(X, y, n_splits: int = 10, test_fraction: float = 0.2,
                        C_grid=C_GRID, k: int = 5, seeds=None) -> dict:
    """Accuracies over stratified train/test splits with CV-selected C per split."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    seeds = list(range(n_splits)) if seeds is None else list(seeds)
    accs, chosen = [], []
    for seed in seeds:
        train, test = stratified_split(y, test_fraction, seed)
        C, _ = select_C(X[train], y[train], C_grid, k, seed)
        pred = _fit_predict(X[train], y[train], X[test], C, seed)
        accs.append(float((pred == y[test]).mean()))
        chosen.append(C)
    return {"accuracies": accs, "C": chosen, "median": float(np.median(accs)), "seeds": seeds}


# -- clustering -------------------------------------------------------------------

@dataclass
class ClusterResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    history: list           # inertia after each Lloyd iteration of the winning run


def _kmeanspp(X, k, rng):
    n = len(X)
    centers = [X[rng.integers(n)]]
    d2 = ((X - centers[0]) ** 2).sum(1)
    for _ in range(1, k):
        total = d2.sum()
        if total == 0:
            idx = int(rng.integers(n))
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(X[idx])
        d2 = np.minimum(d2, ((X - X[idx]) ** 2).sum(1))
    return np.array(centers)


def _assign(X, C):
    d2 = ((X[:, None, :] - C[None, :, :]) ** 2).sum(-1)
    a = d2.argmin(1)
    return a, float(d2[np.arange(len(X)), a].sum())


def kmeans(X, k: int, seed: int = 0, n_init: int = 10, max_iter: int = 300,
           tol: float = 1e-6) -> ClusterResult:
    """k-means++ seeding, Lloyd iterations, best of ``n_init`` restarts."""
    X = np.asarray(X, dtype=float)
    n = len(X)
    if n < k:
        raise RelphError(f"k-means needs n >= k, got n={n}, k={k}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(n_init):
        C = _kmeanspp(X, k, rng)
        a, inertia = _assign(X, C)
        history = [inertia]
        for _ in range(max_iter):
            C = np.array([X[a == j].mean(0) if (a == j).any() else C[j] for j in range(k)])
            a, new = _assign(X, C)
            history.append(new)
            if inertia - new <= tol * max(inertia, 1e-300):
                inertia = new
                break
            inertia = new
        if best is None or inertia < best.inertia:
            best = ClusterResult(a, C, inertia, history)
    return best


def cluster_purity(assignments, groups) -> dict:
    """Per group: (modal cluster, size of modal cluster / group size).

    Ties for the modal cluster go to the smallest cluster id.
    """
    assignments = np.asarray(assignments)
    keys = list(groups)
    if len(keys) != len(assignments):
        raise RelphError("every row needs a group key")
    members: dict = {}
    for g, a in zip(keys, assignments.tolist()):
        members.setdefault(g, []).append(a)
    out = {}
    for g, ids in members.items():
        if not ids:
            raise RelphError(f"group {g!r} is empty")
        cnt = Counter(ids)
        top = max(cnt.values())
        modal = min(c for c, v in cnt.items() if v == top)
        out[g] = (modal, top / len(ids))
    return out


# -- label noise -------------------------------------------------------------------

def relabel_noise(cloud: LabeledPointCloud, fraction: float, species_set=("N", "M1", "M2"),
                  seed: int = 0) -> LabeledPointCloud:
    """Relabel floor(fraction * count) random points of each listed species.

    Each chosen point takes one of the other listed labels with equal
    probability. Positions never change. Points relabeled into or out of a
    macrophage class get omega consistent with the new label (0.25 for M1,
    0.75 for M2, NaN otherwise); untouched points keep theirs.
    """
    if not 0 <= fraction <= 1:
        raise RelphError("fraction must be in [0, 1]")
    species_set = tuple(species_set)
    unknown = [s for s in species_set if s not in ("V", "T", "N", "M", "M1", "M2", "S")]
    if unknown or len(species_set) < 2:
        raise UnknownSpeciesError(f"cannot relabel among {species_set}")
    rng = np.random.default_rng(seed)
    labels = np.array(cloud.labels, dtype=object)
    omega = cloud.omega.copy()
    original = labels.copy()
    for s in species_set:
        idx = np.flatnonzero(original == s)
        n = int(np.floor(fraction * len(idx)))
        if n == 0:
            continue
        chosen = np.sort(rng.choice(idx, n, replace=False))
        others = [t for t in species_set if t != s]
        new = np.array(others, dtype=object)[rng.integers(0, len(others), n)]
        labels[chosen] = new
        omega[chosen] = [0.25 if t == "M1" else 0.75 if t == "M2" else np.nan for t in new]
    return LabeledPointCloud(cloud.points, tuple(labels.tolist()), omega, name=cloud.name)
