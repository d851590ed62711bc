import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relph import datagen as dg
from relph.errors import RelphError
from relph.filtrations import vietoris_rips
from relph.geometry import within_distances
from relph.persistence import diagrams


def species_count(cloud, s):
    return int((np.array(cloud.labels) == s).sum())


def test_elimination_has_no_tumour_and_m1_majority():
    for seed in range(5):
        c = dg.generate(dg.RegimeParams("elimination", seed=seed))
        assert species_count(c, "T") == 0
        m1, m2 = species_count(c, "M1"), species_count(c, "M2")
        assert m1 / (m1 + m2) > 0.5


def mean_tumour_vessel_distance(cloud):
    T, V = cloud.subcloud("T"), cloud.subcloud("V")
    d = np.linalg.norm(T[:, None] - V[None], axis=2)
    return d.min(axis=1).mean()


def test_escape_tumour_closer_to_vessels_than_equilibrium():
    counts = {"V": 50, "T": 200, "N": 50, "M": 150}
    esc = [mean_tumour_vessel_distance(dg.generate(dg.RegimeParams("escape", counts=counts, seed=s)))
           for s in range(20)]
    eq = [mean_tumour_vessel_distance(dg.generate(dg.RegimeParams("equilibrium", counts=counts, seed=s)))
          for s in range(20)]
    assert np.mean(esc) < np.mean(eq)


def test_equilibrium_annulus_has_one_long_loop():
    width = 0.07 * 100
    for seed in range(3):
        c = dg.generate(dg.RegimeParams("equilibrium", seed=seed))
        pd1 = diagrams(vietoris_rips(within_distances(c, "M1")), drop_zero=True)[1]
        pers = pd1.finite[:, 1] - pd1.finite[:, 0]
        assert (pers > width).sum() == 1


def test_escape_m2_majority():
    c = dg.generate(dg.RegimeParams("escape", seed=3))
    assert species_count(c, "M2") > species_count(c, "M1")


@settings(max_examples=15)
@given(st.integers(0, 10_000))
def test_vessels_shared_and_points_in_domain(seed):
    clouds = [dg.generate(dg.RegimeParams(r, seed=seed)) for r in dg.REGIMES]
    vs = [c.subcloud("V") for c in clouds]
    assert all(np.array_equal(vs[0], v) for v in vs[1:])
    for c in clouds:
        assert (c.points >= 0).all() and (c.points <= 100).all()


def test_deterministic():
    p = dg.RegimeParams(chi=4.0, c_half=0.6, seed=11)
    a, b = dg.generate(p), dg.generate(p)
    assert np.array_equal(a.points, b.points) and a.labels == b.labels


def test_omega_matches_labels():
    c = dg.generate(dg.RegimeParams("escape", seed=0))
    lab = np.array(c.labels)
    om = c.omega
    assert (om[lab == "M1"] < 0.5).all() and (om[lab == "M2"] >= 0.5).all()
    assert np.isnan(om[~np.isin(lab, ["M1", "M2"])]).all()


def test_knob_layout():
    assert dg.designed_regime(0.0, 0.0) == "equilibrium"
    assert dg.designed_regime(8.0, 0.0) == "elimination"
    assert dg.designed_regime(8.0, 0.8) == "escape"
    boundary = [(i, j) for i in range(9) for j in range(9) if dg.is_boundary_cell(i, j)]
    assert len(boundary) == 28
    # interior cells always resolve to their designed regime
    for p in dg.grid_params(2):
        i, j = dg.knob_index(p)
        if not dg.is_boundary_cell(i, j):
            assert dg.resolve_regime(p) == dg.designed_regime(p.chi, p.c_half)


def test_boundary_cells_mix():
    rng = np.random.default_rng(0)
    i, j = next((i, j) for i in range(9) for j in range(9) if dg.is_boundary_cell(i, j))
    own = dg.designed_regime(dg.CHI_VALUES[i], dg.C_HALF_VALUES[j])
    draws = [dg.sample_regime(i, j, rng) for _ in range(2000)]
    assert 0.55 < np.mean([d == own for d in draws]) < 0.65


def test_grid_size():
    ps = dg.grid_params(20)
    assert len(ps) == 1620 and len({p.seed for p in ps}) == 1620


@pytest.mark.parametrize("counts", [{"T": -1}, {"M": 601}, {"N": 2.5}])
def test_invalid_counts(counts):
    with pytest.raises(RelphError):
        dg.RegimeParams("escape", counts=counts)


def test_invalid_params():
    with pytest.raises(RelphError):
        dg.RegimeParams()
    with pytest.raises(RelphError):
        dg.RegimeParams("growth")
    with pytest.raises(RelphError):
        dg.RegimeParams("escape", domain=0)


def test_phenotype_labels_and_determinism():
    labels = [dg.phenotype_label(dg.generate_phenotype(s)) for s in range(40)]
    assert 0 < sum(labels) < 40
    a, b = dg.generate_phenotype(5), dg.generate_phenotype(5)
    assert np.array_equal(a.points, b.points)
