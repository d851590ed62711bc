import logging
import math

import numpy as np
import pytest

from relph import datagen as dg
from relph.errors import EmptySubcloudError, RelphError
from relph.features import (DOWKER_BLOCKS, SIMPLE_NAMES, dowker_diagrams, dowker_features,
                            fit_specs, simple_descriptor, vectorize, vr_features, witness_entry_names,
                            witness_vector)
from relph.geometry import LabeledPointCloud


def small_cloud(seed=0):
    r = np.random.default_rng(seed)
    V = r.uniform(0, 20, (8, 2))
    T = r.uniform(0, 20, (15, 2))
    N = r.uniform(0, 20, (6, 2))
    M = r.uniform(0, 20, (10, 2))
    om = np.r_[r.uniform(0, 0.5, 5), r.uniform(0.5, 1, 5)]
    pts = np.vstack([V, T, N, M])
    labels = ["V"] * 8 + ["T"] * 15 + ["N"] * 6 + ["M1"] * 5 + ["M2"] * 5
    omega = np.r_[np.full(29, np.nan), om]
    return LabeledPointCloud(pts, labels, omega)


def test_lengths():
    c = small_cloud()
    assert len(dowker_features(c).vector) == 2400
    assert len(vr_features(c, max_value=6.0).vector) == 1600
    assert len(witness_vector(c, 1).vector) == 12
    assert len(witness_vector(c, 2).vector) == 24
    assert len(simple_descriptor(c).vector) == 6
    assert dowker_features(c).names[0] == "D_M_V_pd0_000"


def test_witness_entry_names_order():
    names = witness_entry_names(1)
    assert names[:3] == ("dB_pd0_T_N", "dB_pd0_T_M", "dB_pd0_N_M")
    assert names[3] == "dW_pd0_T_N" and names[6] == "dB_pd1_T_N"
    v2 = witness_entry_names(2)
    assert len(v2) == 24 and v2[:6] == ("dB_pd0_T_N", "dB_pd0_T_M1", "dB_pd0_T_M2",
                                        "dB_pd0_N_M1", "dB_pd0_N_M2", "dB_pd0_M1_M2")


def test_dowker_blocks_nonnegative_and_shared_specs():
    clouds = [small_cloud(s) for s in range(3)]
    diags = [dowker_diagrams(c) for c in clouds]
    specs = fit_specs(diags, DOWKER_BLOCKS)
    vecs = [vectorize(d, specs, DOWKER_BLOCKS).vector for d in diags]
    assert all(len(v) == 2400 and (v >= 0).all() for v in vecs)


def test_dowker_coincident_sites():
    sites = np.array([(0, 0), (5, 0), (0, 5)], float)
    pts = np.vstack([sites] * 3)
    c = LabeledPointCloud(pts, ["V"] * 3 + ["T"] * 3 + ["M"] * 3)
    d = dowker_diagrams(c)
    for k in ("D_M_V_pd0", "D_T_V_pd0", "D_M_T_pd0"):
        assert (d[k].pairs[:, 0] == 0).all()


def test_dowker_missing_species():
    c = LabeledPointCloud(np.array([(0, 0), (1, 1)], float), ["V", "T"])
    with pytest.raises(EmptySubcloudError, match="M"):
        dowker_features(c)


def test_identical_witness_species_give_zero_entries():
    r = np.random.default_rng(3)
    V = r.uniform(0, 10, (7, 2))
    W = r.uniform(0, 10, (12, 2))
    c = LabeledPointCloud(np.vstack([V, W, W, W[:4]]), ["V"] * 7 + ["T"] * 12 + ["N"] * 12 + ["M"] * 4)
    vec = witness_vector(c, 1)
    d = dict(zip(vec.names, vec.vector))
    assert d["dB_pd0_T_N"] == d["dW_pd0_T_N"] == d["dB_pd1_T_N"] == d["dW_pd1_T_N"] == 0.0
    assert np.isfinite(vec.vector).all() and (vec.vector >= 0).all()


def _rot(P, k):
    th = 2 * math.pi * k / 3
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    return np.asarray(P) @ R.T


def test_rotated_witnesses_give_zero():
    # landmarks: equilateral triangle plus its centre, symmetric under 120 degree turns
    V = np.vstack([_rot([(0.0, 5.0)], k) for k in range(3)] + [np.zeros((1, 2))])
    T = np.array([(0.5, 3.0), (1.2, 1.0), (-0.3, 4.1)])
    N = _rot(T, 1)
    M = np.array([(0.0, -1.0)])
    c = LabeledPointCloud(np.vstack([V, T, N, M]), ["V"] * 4 + ["T"] * 3 + ["N"] * 3 + ["M"])
    d = dict(zip(*(lambda w: (w.names, w.vector))(witness_vector(c, 1))))
    for key in ("dB_pd0_T_N", "dW_pd0_T_N", "dB_pd1_T_N", "dW_pd1_T_N"):
        assert d[key] == 0.0


def test_witness_species_swap_permutes_entries():
    c = small_cloud(5)
    lab = np.array(c.labels, dtype=object)
    swapped = np.where(lab == "T", "N", np.where(lab == "N", "T", lab))
    c2 = c.with_labels(tuple(swapped.tolist()), c.omega)
    a = dict(zip(witness_entry_names(1), witness_vector(c, 1).vector))
    b = dict(zip(witness_entry_names(1), witness_vector(c2, 1).vector))
    for k, v in a.items():
        m, dim, s1, s2 = k.split("_")
        swap = {"T": "N", "N": "T"}
        x, y = swap.get(s1, s1), swap.get(s2, s2)
        key = f"{m}_{dim}_{x}_{y}" if f"{m}_{dim}_{x}_{y}" in b else f"{m}_{dim}_{y}_{x}"
        assert b[key] == v


def test_witness_missing_species():
    c = LabeledPointCloud(np.array([(0, 0), (5, 0), (0, 5), (1, 1), (2, 1)], float),
                          ["V", "V", "V", "T", "M"])
    with pytest.raises(EmptySubcloudError, match="N"):
        witness_vector(c, 1)
    assert len(witness_vector(c, 1, empty="saturate").vector) == 12


def test_rigid_motion_invariance():
    c = small_cloud(7)
    th = 1.1
    R = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    moved = LabeledPointCloud(c.points @ R.T + np.array([3.0, -8.0]), c.labels, c.omega)
    for f in (lambda x: witness_vector(x, 2).vector, lambda x: simple_descriptor(x).vector):
        assert np.allclose(f(c), f(moved), rtol=0, atol=1e-9)
    da, db = dowker_diagrams(c), dowker_diagrams(moved)
    specs = fit_specs([da], DOWKER_BLOCKS)
    assert np.allclose(vectorize(da, specs, DOWKER_BLOCKS).vector,
                       vectorize(db, specs, DOWKER_BLOCKS).vector, atol=1e-9)


def test_simple_descriptor_examples(caplog):
    V = np.array([(0, 0), (10, 0)], float)
    T = np.array([(0, 2), (2, 0), (10, 2), (8, 0), (0, -2)], float)
    M = np.array([(10, 0)], float)
    c = LabeledPointCloud(np.vstack([V, T, M]), ["V"] * 2 + ["T"] * 5 + ["M"])
    with caplog.at_level(logging.WARNING):
        s = simple_descriptor(c)
    assert dict(zip(SIMPLE_NAMES, s.vector)) == {"count_T": 5, "count_M": 1, "count_N": 0,
                                                 "dist_T_V": 2.0, "dist_N_V": 0.0, "dist_M_V": 0.0}
    assert "N" in caplog.text


def test_simple_descriptor_needs_vessels():
    with pytest.raises(EmptySubcloudError):
        simple_descriptor(LabeledPointCloud(np.array([(0, 0)], float), ["T"]))


def test_witness_vector_version_check():
    with pytest.raises(RelphError):
        witness_vector(small_cloud(), 3)


def test_generated_cloud_features():
    c = dg.generate(dg.RegimeParams(regime="escape", seed=1))
    w = witness_vector(c, 2)
    assert len(w.vector) == 24 and np.isfinite(w.vector).all()
