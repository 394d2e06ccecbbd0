import numpy as np
import pytest
from scipy.spatial import ConvexHull

from lpmink import build_polytope
from lpmink.errors import EmptyInterior, NonPositiveScale, UnboundedIntersection
from lpmink.polytope import scale, support_value, translate, volume_hessian

from conftest import cube, square, tetrahedron

# Frozen from an independent qhull halfspace intersection (3D instance,
# gen seed 11) with h = H3 below.
U3 = np.array([[0.01868144, 0.74290675, 0.66913418],
               [-0.64429156, -0.37620337, -0.66585239],
               [0.60541753, -0.05957666, 0.79367514],
               [-0.76208426, 0.64625461, -0.03978154],
               [0.86042488, -0.17270546, -0.47941824],
               [0.47885726, 0.85254939, -0.20941648],
               [-0.13660044, 0.61305764, -0.77813922]])
H3 = np.array([1.0, 1.2, 0.9, 1.1, 1.3, 0.8, 1.05])
QHULL_VOLUME = 23.09050433739339
QHULL_AREAS = np.array([3.08928822, 21.83481286, 22.27075697, 7.31809556, 5.88056181,
                        2.73834426, 1.95376878])


def random_polytope(rng, n, N):
    U = rng.normal(size=(N, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    U = np.vstack([U, -U.sum(axis=0) / np.linalg.norm(U.sum(axis=0))])
    return U, rng.uniform(0.5, 1.5, len(U))


def test_unit_square():
    P = build_polytope(square().directions, np.ones(4))
    assert P.volume == pytest.approx(4)
    assert np.allclose(P.facet_areas, 2)
    assert P.diameter == pytest.approx(2 * np.sqrt(2))
    assert P.contains_origin_interior


def test_right_triangle():
    U = np.array([[-1, 0], [0, -1], [1, 1]]) / np.array([[1], [1], [np.sqrt(2)]])
    P = build_polytope(U, [0, 0, 4 / np.sqrt(2)])
    assert P.volume == pytest.approx(8)
    assert np.allclose(P.facet_areas, [4, 4, 4 * np.sqrt(2)])
    assert not P.contains_origin_interior


def test_cube_and_tetrahedron():
    P = build_polytope(cube().directions, np.ones(6))
    assert P.volume == pytest.approx(8)
    assert np.allclose(P.facet_areas, 4)
    T = build_polytope(tetrahedron().directions, np.ones(4))
    # regular tetrahedron with inradius 1: V = 8 sqrt(3), each face 6 sqrt(3)
    assert T.volume == pytest.approx(8 * np.sqrt(3))
    assert np.allclose(T.facet_areas, 6 * np.sqrt(3))


def test_4d_cube():
    I = np.eye(4)
    P = build_polytope(np.vstack([I, -I]), np.ones(8))
    assert P.volume == pytest.approx(16)
    assert np.allclose(P.facet_areas, 8)


def test_matches_frozen_qhull_values():
    P = build_polytope(U3, H3)
    assert P.volume == pytest.approx(QHULL_VOLUME, rel=1e-8)
    assert np.allclose(P.facet_areas, QHULL_AREAS, rtol=1e-7)


def test_redundant_constraint_has_zero_area():
    U = np.vstack([square().directions, [np.sqrt(0.5), np.sqrt(0.5)]])
    P = build_polytope(U, [1, 1, 1, 1, 5])
    assert P.facet_areas[4] == 0
    assert not P.facet_flags[4]
    assert P.support_values[4] == pytest.approx(np.sqrt(2))
    assert P.n_facets == 4


def test_errors():
    with pytest.raises(UnboundedIntersection):
        build_polytope([[1, 0], [0, 1], [0.6, 0.8]], [1, 1, 1])
    with pytest.raises(EmptyInterior):
        build_polytope(square().directions, [1, 1, -2, 1])
    with pytest.raises(EmptyInterior):
        build_polytope(square().directions, [1, 0, 1, 0])
    with pytest.raises(NonPositiveScale):
        scale(build_polytope(square().directions, np.ones(4)), 0)


def test_translate_and_scale():
    P = build_polytope(U3, H3)
    x = np.array([0.1, -0.2, 0.05])
    Q = translate(P, x)
    R = build_polytope(U3, H3 + U3 @ x)
    assert np.allclose(Q.support_values, R.support_values)
    assert Q.volume == pytest.approx(R.volume)
    S = scale(P, 2.5)
    R = build_polytope(U3, 2.5 * H3)
    assert S.volume == pytest.approx(R.volume)
    assert np.allclose(S.facet_areas, R.facet_areas)
    assert support_value(S, U3[0]) == pytest.approx(R.support_values[0])


@pytest.mark.parametrize("n, N", [(2, 6), (3, 7), (4, 8)])
def test_volume_agrees_with_convex_hull(n, N):
    rng = np.random.default_rng(n)
    for _ in range(5):
        U, h = random_polytope(rng, n, N)
        P = build_polytope(U, h)
        assert P.volume == pytest.approx(ConvexHull(P.vertices).volume, rel=1e-9)
        # cone-volume identity about the origin
        assert P.volume == pytest.approx((P.support_values * P.facet_areas).sum() / n, rel=1e-9)


@pytest.mark.parametrize("n, N", [(2, 6), (3, 7), (4, 8)])
def test_volume_hessian_matches_differences(n, N):
    rng = np.random.default_rng(10 + n)
    U, h = random_polytope(rng, n, N)
    P = build_polytope(U, h)
    H = volume_hessian(P)
    eps = 1e-6
    for j in range(len(h)):
        e = np.zeros(len(h))
        e[j] = eps
        fd = (build_polytope(U, h + e).facet_areas - build_polytope(U, h - e).facet_areas) / (2 * eps)
        assert np.allclose(H[:, j], fd, atol=1e-5 * max(1, np.abs(fd).max()))
    # Euler: the areas are homogeneous of degree n-1
    assert np.allclose(H @ P.support_numbers, (n - 1) * P.facet_areas, rtol=1e-9, atol=1e-12)
