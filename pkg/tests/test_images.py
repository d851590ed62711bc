import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from relph.errors import InvalidSpecError
from relph.images import ImageSpec, fit_image_spec, persistence_image, with_ranges
from relph.persistence import PersistenceDiagram as PD

SPEC = ImageSpec((20, 20), 1.0, (0.0, 10.0), (0.0, 5.0), 5.0)


def pd(pairs):
    return PD(1, np.array(pairs, dtype=float).reshape(-1, 2))


pairs = st.lists(st.tuples(st.floats(0, 10), st.floats(0, 5)).map(lambda t: (t[0], t[0] + t[1])),
                 max_size=8)


def test_empty_and_diagonal_are_zero():
    assert (persistence_image(pd([]), SPEC).grid == 0).all()
    assert (persistence_image(pd([(1, 1), (3, 3)]), SPEC).grid == 0).all()


def test_flat_is_row_major_and_shape():
    img = persistence_image(pd([(2, 4)]), SPEC)
    assert img.grid.shape == (20, 20) and img.flat.shape == (400,)
    assert np.array_equal(img.flat, img.grid.reshape(-1))
    # row = persistence bin from the bottom, column = birth bin
    r, c = np.unravel_index(img.grid.argmax(), img.grid.shape)
    assert r == int(2 / 0.25) - 1 or r == int(2 / 0.25)
    assert c == int(2 / 0.5) - 1 or c == int(2 / 0.5)


def test_single_point_mass_converges_to_weight():
    # (0, 2) with p_max 2: weight 1, total mass 1 once ranges reach +-6 sigma
    spec = ImageSpec((20, 20), 1.0, (-6.0, 6.0), (2 - 6.0, 2 + 6.0), 2.0)
    s = persistence_image(pd([(0, 2)]), spec).grid.sum()
    assert abs(s - 1.0) < 1e-6 and s <= 1.0
    half = ImageSpec((20, 20), 1.0, (-6.0, 6.0), (2 - 6.0, 2 + 6.0), 4.0)
    assert abs(persistence_image(pd([(0, 2)]), half).grid.sum() - 0.5) < 1e-6


def test_essential_pairs_counted_not_drawn():
    img = persistence_image(pd([(0, math.inf), (1, 2)]), SPEC)
    assert img.n_essential == 1
    assert np.array_equal(img.grid, persistence_image(pd([(1, 2)]), SPEC).grid)


@given(pairs, pairs)
def test_additivity(A, B):
    ia = persistence_image(pd(A), SPEC).grid
    ib = persistence_image(pd(B), SPEC).grid
    iab = persistence_image(pd(A + B), SPEC).grid
    assert np.array_equal(iab, ia + ib)
    assert np.array_equal(persistence_image(pd(B + A), SPEC).grid, iab)


@given(pairs, st.lists(st.floats(0, 10), max_size=5))
def test_diagonal_invariance_exact(A, ts):
    base = persistence_image(pd(A), SPEC).grid
    more = persistence_image(pd(A + [(t, t) for t in ts]), SPEC).grid
    assert np.array_equal(base, more)


@given(pairs, st.floats(0, 3), st.floats(0, 3))
def test_monotone_mass(A, grow_b, grow_p):
    small = persistence_image(pd(A), SPEC).grid.sum()
    big_spec = with_ranges(SPEC, (0.0 - grow_b, 10.0 + grow_b), (0.0 - grow_p, 5.0 + grow_p))
    # more pixels of the same width would change the grid, so compare integrals over a superset
    assert persistence_image(pd(A), big_spec).grid.sum() >= small - 1e-12


def test_lipschitz_smoke():
    base = np.array([(2.0, 4.0), (5.0, 6.5)])
    f0 = persistence_image(pd(base), SPEC).flat

    def change(delta):
        moved = base.copy()
        moved[0] += delta
        return np.abs(persistence_image(pd(moved), SPEC).flat - f0).max()

    slope = change(1e-2) / 1e-2
    assert change(1e-3) <= 2 * slope * 1e-3


def test_nonnegative(rng):
    A = np.sort(rng.uniform(0, 10, (30, 2)), axis=1)
    assert (persistence_image(pd(A), SPEC).grid >= 0).all()


@pytest.mark.parametrize("kwargs", [
    dict(resolution=(0, 20)), dict(sigma=0.0), dict(birth_range=(1.0, 1.0)),
    dict(persistence_range=(0.0, math.inf)), dict(max_persistence=-1.0), dict(weight="cubic"),
])
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidSpecError):
        ImageSpec(**kwargs)


def test_weight_zero_at_zero_persistence():
    assert SPEC.weight_of(0.0) == 0.0
    assert SPEC.weight_of(10.0) == 1.0


def test_fit_image_spec_padding():
    spec = fit_image_spec([pd([(0, 2)]), pd([(10, 14)])])
    assert spec.birth_range == (-0.5, 10.5)
    assert spec.persistence_range == (-0.2, 4.2)
    assert spec.max_persistence == 4.0
    assert ImageSpec.from_json(spec.to_json()) == spec
