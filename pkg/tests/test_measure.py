import numpy as np
import pytest

from lpmink import (
    build_measure,
    find_essential_subspaces,
    is_concentrated_on_closed_hemisphere,
    is_in_general_position,
    satisfies_existence_hypothesis,
)
from lpmink.errors import (
    EmptyInput,
    InvalidMeasure,
    NonPositiveWeight,
    NonUnitDirection,
    TooFewDirections,
)
from lpmink.measure import Subspace

from conftest import cube, square, tetrahedron, triangle


def test_directions_are_normalized_and_norms_kept():
    m = build_measure(2, [[2, 0], [0, 3], [-1, -1]], [1, 1, 1])
    assert np.allclose(np.linalg.norm(m.directions, axis=1), 1)
    assert np.allclose(m.input_norms, [2, 3, np.sqrt(2)])


def test_duplicate_directions_merge_weights():
    m = build_measure(2, [[1, 0], [2, 0], [0, 1], [-1, -1]], [1, 2, 1, 1])
    assert m.size == 3
    assert m.weights[0] == 3
    assert m.sources[0] == (0, 1)


def test_arrays_are_read_only():
    m = square()
    with pytest.raises(ValueError):
        m.weights[0] = 5


@pytest.mark.parametrize("dirs, w, err", [
    ([[0, 0], [0, 1], [-1, -1]], [1, 1, 1], NonUnitDirection),
    ([[np.nan, 0], [0, 1], [-1, -1]], [1, 1, 1], NonUnitDirection),
    ([[1, 0], [0, 1], [-1, -1]], [1, 0, 1], NonPositiveWeight),
    ([[1, 0], [0, 1], [-1, -1]], [1, -2, 1], NonPositiveWeight),
    ([[1, 0], [-1, 0]], [1, 1], TooFewDirections),
    ([[1, 0], [1, 0], [-1, 0]], [1, 1, 1], TooFewDirections),
    (np.zeros((0, 2)), [], EmptyInput),
    ([[1, 0, 0], [0, 1, 0]], [1, 1], InvalidMeasure),
])
def test_invalid_measures(dirs, w, err):
    with pytest.raises(err):
        build_measure(2, dirs, w)


def test_three_directions_in_r3_too_few():
    with pytest.raises(TooFewDirections):
        build_measure(3, np.eye(3), [1, 1, 1])


def test_hemisphere_examples():
    assert not is_concentrated_on_closed_hemisphere(square().directions)
    assert not is_concentrated_on_closed_hemisphere(tetrahedron().directions)
    # all in the closed upper half plane, two on its boundary
    assert is_concentrated_on_closed_hemisphere(np.array([[1, 0], [0, 1], [-1, 0.0]]))
    assert is_concentrated_on_closed_hemisphere(np.array([[1, 0], [0.6, 0.8], [0, 1.0]]))


def test_hemisphere_inside_subspace():
    # +-e1 inside span(e1, e2) of R^3 does not span it
    sub = Subspace(2, np.eye(3)[:2], (0, 1))
    assert is_concentrated_on_closed_hemisphere(np.array([[1, 0, 0], [-1, 0, 0.0]]), sub)
    D = np.array([[1, 0, 0], [0, 1, 0], [-1, -1, 0.0]]) / [[1], [1], [np.sqrt(2)]]
    assert not is_concentrated_on_closed_hemisphere(D, sub)


def test_cube_has_six_coordinate_subspaces():
    ess = find_essential_subspaces(cube())
    members = sorted(tuple(s.members) for s in ess)
    assert members == [(0, 1, 3, 4), (0, 2, 3, 5), (0, 3), (1, 2, 4, 5), (1, 4), (2, 5)]
    for s in ess:
        assert np.allclose(s.basis @ s.basis.T, np.eye(s.dim_sub))


def test_square_has_two_axes():
    assert sorted(s.members for s in find_essential_subspaces(square())) == [(0, 2), (1, 3)]


def test_tetrahedron_and_triangle_have_none():
    assert find_essential_subspaces(tetrahedron()) == []
    assert find_essential_subspaces(triangle()) == []
    assert satisfies_existence_hypothesis(tetrahedron())


def test_general_position():
    assert is_in_general_position(tetrahedron().directions)
    assert not is_in_general_position(cube().directions)
    # three coplanar directions in R^3
    D = np.array([[1, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [-1, -1, -1.0]])
    assert not is_in_general_position(D / np.linalg.norm(D, axis=1, keepdims=True))


def test_essential_subspace_ignores_weights_and_order():
    rng = np.random.default_rng(4)
    m = cube()
    perm = rng.permutation(6)
    m2 = build_measure(3, m.directions[perm], rng.uniform(0.1, 9, 6))
    spans = lambda ms: sorted(sorted(map(tuple, np.round(ms.directions[list(s.members)], 9).tolist()))
                              for s in find_essential_subspaces(ms))
    assert spans(m) == spans(m2)
