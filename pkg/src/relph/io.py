"""File formats: point-cloud CSV, diagram JSON, feature CSV, results JSON.

Everything is written with ``\\n`` line endings, floats in shortest
round-trip form, JSON keys sorted, and through a temp file plus rename so a
reader never sees a partial file.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import RelphError
from .geometry import LabeledPointCloud
from .persistence import PersistenceDiagram

CLOUD_HEADER = ("x", "y", "label", "omega")


class FormatError(RelphError):
    """Malformed input file."""


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1, allow_nan=False) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return obj


def write_json(path, obj) -> None:
    atomic_write(path, dumps_json(obj))


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- point clouds --------------------------------------------------------------------

def cloud_to_csv(cloud: LabeledPointCloud) -> str:
    lines = [",".join(CLOUD_HEADER)]
    om = cloud.omega
    for (x, y), lab, w in zip(cloud.points, cloud.labels, om):
        lines.append(f"{fmt_float(x)},{fmt_float(y)},{lab},{'' if np.isnan(w) else fmt_float(w)}")
    return "\n".join(lines) + "\n"


def write_cloud(path, cloud: LabeledPointCloud) -> None:
    atomic_write(path, cloud_to_csv(cloud))


def read_cloud(path) -> LabeledPointCloud:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_cloud(fh.read(), name=path.stem)


def parse_cloud(text: str, name: str = "") -> LabeledPointCloud:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(c.strip() for c in rows[0]) != CLOUD_HEADER:
        raise FormatError(f"{name or 'cloud'}: header must be {','.join(CLOUD_HEADER)}")
    pts, labels, omega = [], [], []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise FormatError(f"{name or 'cloud'} line {n}: expected 4 fields, got {len(row)}")
        try:
            x, y = float(row[0]), float(row[1])
            w = float(row[3]) if row[3].strip() else math.nan
        except ValueError as exc:
            raise FormatError(f"{name or 'cloud'} line {n}: {exc}") from None
        pts.append((x, y))
        labels.append(row[2].strip())
        omega.append(w)
    P = np.array(pts, dtype=float).reshape(-1, 2)
    om = np.array(omega, dtype=float)
    return LabeledPointCloud(P, tuple(labels), om if not np.isnan(om).all() else None, name=name)


# -- diagrams ---------------------------------------------------------------------------

def write_diagrams(path, diags: dict) -> None:
    write_json(path, {k: d.to_json() for k, d in diags.items()})


def read_diagrams(path) -> dict:
    return {k: PersistenceDiagram.from_json(v) for k, v in read_json(path).items()}


# -- feature matrices ------------------------------------------------------------------

def features_to_csv(ids, names, X) -> str:
    X = np.asarray(X, dtype=float)
    if X.shape != (len(ids), len(names)):
        raise RelphError(f"feature matrix shape {X.shape} does not match {len(ids)} ids x {len(names)} names")
    lines = [",".join(["id", *names])]
    for i, row in zip(ids, X):
        lines.append(",".join([str(i), *(fmt_float(v) for v in row)]))
    return "\n".join(lines) + "\n"


def write_features(path, ids, names, X) -> None:
    atomic_write(path, features_to_csv(ids, names, X))


def read_features(path):
    """Returns (ids, names, X)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "id":
        raise FormatError(f"{path}: first column must be 'id'")
    names = rows[0][1:]
    ids = [r[0] for r in rows[1:] if r]
    X = np.array([[float(v) for v in r[1:]] for r in rows[1:] if r], dtype=float)
    return ids, names, X.reshape(len(ids), len(names))
