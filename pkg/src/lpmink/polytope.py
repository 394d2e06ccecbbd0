"""Polytopes given by halfspaces ``{x : x.u_k <= h_k}``.

Vertices come from brute-force enumeration of n-subsets of constraint
boundaries (see :mod:`lpmink.kernels`). Face volumes are computed by a
recursive fan from the face centroid: a d-face splits into cones over its
ridges, each of volume ``dist(centroid, ridge) * vol(ridge) / d``. The
polytope volume is the top level of the same recursion.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import kernels
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import EmptyInterior, NonPositiveScale, UnboundedIntersection
from .measure import is_concentrated_on_closed_hemisphere

__all__ = [
    "Polytope",
    "build_polytope",
    "facet_area_vector",
    "support_value",
    "translate",
    "scale",
    "diameter",
    "volume_hessian",
]


@dataclass(frozen=True)
class Polytope:
    dim: int
    directions: np.ndarray
    support_numbers: np.ndarray
    vertices: np.ndarray
    facet_areas: np.ndarray
    volume: float
    support_values: np.ndarray
    diameter: float
    facet_threshold: float
    contains_origin_interior: bool
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)
    incidence: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def facet_flags(self) -> np.ndarray:
        return self.facet_areas > self.facet_threshold

    @property
    def n_facets(self) -> int:
        return int(self.facet_flags.sum())

    @property
    def centroid(self) -> np.ndarray:
        """Average of the vertices; always interior."""
        return self.vertices.mean(axis=0)

    def to_dict(self) -> dict:
        return {
            "directions": self.directions.tolist(),
            "support_numbers": self.support_numbers.tolist(),
            "vertices": self.vertices.tolist(),
            "facet_areas": self.facet_areas.tolist(),
            "volume": self.volume,
        }


def _affine_basis(pts: np.ndarray, rank_tol: float):
    """Centroid, orthonormal basis rows and affine dimension of a point set."""
    c = pts.mean(axis=0)
    if len(pts) == 1:
        return c, np.empty((0, pts.shape[1])), 0
    _, sv, Vt = np.linalg.svd(pts - c, full_matrices=False)
    r = int((sv > rank_tol).sum())
    return c, Vt[:r], r


def _polygon_area(P2: np.ndarray) -> float:
    c = P2.mean(axis=0)
    ang = np.arctan2(P2[:, 1] - c[1], P2[:, 0] - c[0])
    Q = P2[np.argsort(ang)]
    x, y = Q[:, 0], Q[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _face_volume(idx: np.ndarray, d: int, V: np.ndarray, active: np.ndarray,
                 rank_tol: float) -> float:
    """d-volume of the face whose vertices are ``V[idx]``.

    ``active[j, v]`` says vertex v lies on constraint j; ridges of the face
    are the vertex subsets sharing one more active constraint.
    """
    pts = V[idx]
    if d == 0:
        return 1.0
    c, B, _ = _affine_basis(pts, rank_tol)
    local = (pts - c) @ B[:d].T
    if d == 1:
        return float(local[:, 0].max() - local[:, 0].min())
    if d == 2:
        return _polygon_area(local)
    total = 0.0
    seen = set()
    sub = active[:, idx]
    for j in range(sub.shape[0]):
        ridge = idx[sub[j]]
        if len(ridge) < d or len(ridge) == len(idx):
            continue
        key = ridge.tobytes()
        if key in seen:
            continue
        rc, RB, r = _affine_basis(V[ridge], rank_tol)
        if r != d - 1:
            continue
        seen.add(key)
        off = c - rc
        dist = float(np.linalg.norm(off - RB.T @ (RB @ off)))
        total += dist * _face_volume(ridge, d - 1, V, active, rank_tol) / d
    return total


def _pairwise_diameter(V: np.ndarray) -> float:
    if len(V) < 2:
        return 0.0
    D = V[:, None, :] - V[None, :, :]
    return float(np.sqrt((D * D).sum(axis=-1).max()))


def build_polytope(directions, support_numbers, tol: Tolerances = DEFAULT_TOLERANCES,
                   check_bounded: bool = True) -> Polytope:
    """Intersect the halfspaces ``x.u_k <= h_k`` and compute its geometry.

    Raises
    ------
    UnboundedIntersection
        If the directions are concentrated on a closed hemisphere (skipped
        when ``check_bounded`` is false, e.g. inside the solver loop after
        the measure has been validated once).
    EmptyInterior
        If the intersection is empty or lower dimensional.
    """
    U = np.ascontiguousarray(directions, dtype=float)
    h = np.ascontiguousarray(support_numbers, dtype=float)
    N, n = U.shape
    if h.shape != (N,):
        raise ValueError(f"{N} directions but {h.size} support numbers")
    if not np.all(np.isfinite(h)):
        raise EmptyInterior("non-finite support numbers")
    if check_bounded and is_concentrated_on_closed_hemisphere(U, tol=tol):
        raise UnboundedIntersection("directions are concentrated on a closed hemisphere")
    size = float(np.abs(h).max()) or 1.0
    V = kernels.enumerate_vertices(U, h, tol.rank, tol.feasibility * size,
                                   tol.vertex_merge * size)
    if len(V) < n + 1:
        raise EmptyInterior(f"intersection has {len(V)} vertices in R^{n}")
    diam = _pairwise_diameter(V)
    rank_tol = max(tol.vertex_merge * size, 1e-12 * diam)
    _, _, r = _affine_basis(V, rank_tol)
    if r < n:
        raise EmptyInterior("intersection is lower dimensional")

    hv = U @ V.T
    support = hv.max(axis=1)
    active = (h[:, None] - hv) <= tol.vertex_merge * size
    areas = np.zeros(N)
    for k in range(N):
        idx = np.flatnonzero(active[k])
        if len(idx) < n:
            continue
        _, _, rk = _affine_basis(V[idx], rank_tol)
        if rk == n - 1:
            areas[k] = _face_volume(idx, n - 1, V, active, rank_tol)
    c = V.mean(axis=0)
    volume = float(((support - U @ c) * areas).sum() / n)
    if not volume > 0:
        raise EmptyInterior("intersection has zero volume")
    thr = tol.facet_rel * diam ** (n - 1)
    return Polytope(
        dim=n, directions=U, support_numbers=h, vertices=V, facet_areas=areas,
        volume=volume, support_values=support, diameter=diam, facet_threshold=thr,
        contains_origin_interior=bool(np.all(support > 0)), tolerances=tol,
        incidence=active)


def facet_area_vector(P: Polytope) -> np.ndarray:
    return P.facet_areas.copy()


def support_value(P: Polytope, u) -> float:
    """``max_v u.v`` over the vertices of ``P``."""
    return float((P.vertices @ np.asarray(u, dtype=float)).max())


def translate(P: Polytope, x) -> Polytope:
    x = np.asarray(x, dtype=float)
    shift = P.directions @ x
    support = P.support_values + shift
    return replace(P, support_numbers=P.support_numbers + shift,
                   vertices=P.vertices + x, support_values=support,
                   contains_origin_interior=bool(np.all(support > 0)))


def scale(P: Polytope, lam: float) -> Polytope:
    if not lam > 0:
        raise NonPositiveScale(f"scale factor must be positive, got {lam}")
    n = P.dim
    return replace(P, support_numbers=lam * P.support_numbers,
                   vertices=lam * P.vertices, support_values=lam * P.support_values,
                   facet_areas=lam ** (n - 1) * P.facet_areas, volume=lam ** n * P.volume,
                   diameter=lam * P.diameter,
                   facet_threshold=lam ** (n - 1) * P.facet_threshold)


def diameter(P: Polytope) -> float:
    return P.diameter


def volume_hessian(P: Polytope) -> np.ndarray:
    """Matrix of ``d a_k / d h_j`` (the Hessian of V in the support numbers).

    For facets k != j meeting in a ridge R_kj the entry is
    ``vol(R_kj) / sin(theta_kj)``; the diagonal is
    ``-sum_j cos(theta_kj) vol(R_kj) / sin(theta_kj)``. Exact while the
    combinatorial type is locally constant (simple polytopes).
    """
    n = P.dim
    N = len(P.support_numbers)
    U = P.directions
    H = np.zeros((N, N))
    facets = np.flatnonzero(P.facet_flags)
    size = float(np.abs(P.support_numbers).max()) or 1.0
    rank_tol = max(P.tolerances.vertex_merge * size, 1e-12 * P.diameter)
    act = P.incidence
    for ii, k in enumerate(facets):
        for j in facets[ii + 1:]:
            ridge = np.flatnonzero(act[k] & act[j])
            if len(ridge) < n - 1:
                continue
            _, _, r = _affine_basis(P.vertices[ridge], rank_tol)
            if r != n - 2:
                continue
            vol = _face_volume(ridge, n - 2, P.vertices, act, rank_tol)
            cos = float(U[k] @ U[j])
            sin = np.sqrt(max(1.0 - cos * cos, 0.0))
            H[k, j] = H[j, k] = vol / sin
            H[k, k] -= cos * vol / sin
            H[j, j] -= cos * vol / sin
    return H
