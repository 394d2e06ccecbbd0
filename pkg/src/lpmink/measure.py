"""Discrete measures on the unit sphere and the existence hypotheses.

A measure is a finite list of distinct unit directions with positive
weights. The solver needs to know whether the directions are concentrated on
a closed hemisphere and whether the measure has an essential subspace; both
checks live here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import List, Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    CombinatorialLimitExceeded,
    EmptyInput,
    InvalidMeasure,
    NonPositiveWeight,
    NonUnitDirection,
    TooFewDirections,
)

__all__ = [
    "DiscreteMeasure",
    "Subspace",
    "build_measure",
    "is_concentrated_on_closed_hemisphere",
    "find_essential_subspaces",
    "is_in_general_position",
    "satisfies_existence_hypothesis",
]


@dataclass(frozen=True)
class DiscreteMeasure:
    """Atomic measure ``sum_k weights[k] * delta_{directions[k]}``.

    ``input_norms[k]`` is the norm of the direction as given before
    normalization and ``sources[k]`` lists the input indices merged into
    atom ``k``.
    """

    dim: int
    directions: np.ndarray
    weights: np.ndarray
    input_norms: np.ndarray = field(repr=False)
    sources: tuple = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    def scaled(self, s: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.dim, self.directions, self.weights * s,
                               self.input_norms, self.sources)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "directions": self.directions.tolist(),
            "weights": self.weights.tolist(),
        }


@dataclass(frozen=True)
class Subspace:
    dim_sub: int
    basis: np.ndarray
    members: tuple

    def projector(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def to_dict(self) -> dict:
        return {"dim": self.dim_sub, "basis": self.basis.tolist(),
                "members": list(self.members)}


def build_measure(dim: int, directions, weights,
                  tol: Tolerances = DEFAULT_TOLERANCES) -> DiscreteMeasure:
    """Validate, normalize and merge duplicate directions.

    Directions are scaled to unit length (the original norms are kept in
    ``input_norms``); directions within ``tol.angular`` of each other are
    merged by summing their weights.
    """
    if int(dim) != dim or dim < 2:
        raise InvalidMeasure(f"dim must be an integer >= 2, got {dim!r}")
    dim = int(dim)
    U = np.asarray(directions, dtype=float)
    w = np.asarray(weights, dtype=float)
    if U.size == 0 or w.size == 0:
        raise EmptyInput("measure has no directions")
    if U.ndim != 2 or U.shape[1] != dim:
        raise InvalidMeasure(f"directions must be an (N, {dim}) array, got shape {U.shape}")
    if w.shape != (U.shape[0],):
        raise InvalidMeasure(f"{U.shape[0]} directions but {w.size} weights")
    if not np.all(np.isfinite(U)):
        raise NonUnitDirection("directions contain non-finite entries")
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        bad = [int(i) for i in np.flatnonzero(~(w > 0) | ~np.isfinite(w))]
        raise NonPositiveWeight(f"weights must be positive and finite (indices {bad})")
    norms = np.linalg.norm(U, axis=1)
    if np.any(norms <= tol.unit_norm):
        bad = [int(i) for i in np.flatnonzero(norms <= tol.unit_norm)]
        raise NonUnitDirection(f"zero-length directions at indices {bad}")
    U = U / norms[:, None]

    dirs: List[np.ndarray] = []
    wts: List[float] = []
    nrm: List[float] = []
    srcs: List[List[int]] = []
    for i, (u, a) in enumerate(zip(U, w)):
        for j, v in enumerate(dirs):
            if np.linalg.norm(u - v) <= tol.angular:
                wts[j] += a
                srcs[j].append(i)
                break
        else:
            dirs.append(u)
            wts.append(float(a))
            nrm.append(float(norms[i]))
            srcs.append([i])
    if len(dirs) < dim + 1:
        raise TooFewDirections(
            f"need at least dim+1 = {dim + 1} distinct directions, got {len(dirs)}")
    D = np.array(dirs)
    D.setflags(write=False)
    W = np.array(wts)
    W.setflags(write=False)
    return DiscreteMeasure(dim, D, W, np.array(nrm), tuple(tuple(s) for s in srcs))


def _rank(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    return int((np.linalg.svd(A, compute_uv=False) > tol).sum())


def is_concentrated_on_closed_hemisphere(directions, subspace: Optional[Subspace] = None,
                                         tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff some nonzero x has x.u <= 0 for every direction u.

    With ``subspace`` given, the directions are expressed in its basis and
    the question is asked inside that subspace. The answer is ``False``
    exactly when the directions span the space and the origin lies in the
    relative interior of their convex hull; the latter is certified by the
    LP ``max t  s.t.  sum l_i u_i = 0, sum l_i = 1, l_i >= t`` having t* > 0.
    """
    U = np.asarray(directions, dtype=float)
    if U.size == 0:
        raise EmptyInput("no directions")
    if U.ndim == 1:
        U = U[None, :]
    if subspace is not None:
        U = U @ subspace.basis.T
    m, d = U.shape
    if _rank(U, tol.rank) < d:
        return True
    # variables (l_1..l_m, t); minimize -t
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_eq = np.zeros((d + 1, m + 1))
    A_eq[:d, :m] = U.T
    A_eq[d, :m] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    A_ub = np.hstack([-np.eye(m), np.ones((m, 1))])
    b_ub = np.zeros(m)
    bounds = [(None, None)] * m + [(None, 1.0)]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=bounds, method="highs")
    if res.status == 2:  # infeasible: 0 is not even in the affine hull
        return True
    if res.status != 0:
        raise RuntimeError(f"hemisphere LP failed: {res.message}")
    return not (-res.fun > tol.hemisphere_lp)


def find_essential_subspaces(measure: DiscreteMeasure, budget: int = 10**6,
                             tol: Tolerances = DEFAULT_TOLERANCES) -> List[Subspace]:
    """All proper subspaces X whose member directions are not concentrated
    on a closed hemisphere of X.

    Only subspaces spanned by directions can qualify, so candidates are the
    spans of linearly independent d-subsets, d = 1..n-1. Two candidates with
    the same member set are the same subspace (each is the span of its
    members), which is how duplicates are removed.
    """
    U = measure.directions
    N, n = U.shape
    total = sum(comb(N, d) for d in range(1, n))
    if total > budget:
        raise CombinatorialLimitExceeded(
            f"{total} subsets to enumerate exceeds the budget of {budget}")
    seen = set()
    found: List[Subspace] = []
    for d in range(1, n):
        for S in combinations(range(N), d):
            A = U[list(S)]
            _, sv, Vt = np.linalg.svd(A, full_matrices=False)
            if sv[-1] <= tol.rank:
                continue
            Q = Vt[:d]
            resid = np.linalg.norm(U - (U @ Q.T) @ Q, axis=1)
            members = tuple(int(i) for i in np.flatnonzero(resid <= tol.subspace_member))
            if members in seen:
                continue
            seen.add(members)
            # canonical orthonormal basis from every member
            _, _, Vt = np.linalg.svd(U[list(members)], full_matrices=False)
            sub = Subspace(d, Vt[:d], members)
            if not is_concentrated_on_closed_hemisphere(U[list(members)], sub, tol):
                found.append(sub)
    found.sort(key=lambda s: (s.dim_sub, s.members))
    return found


def is_in_general_position(directions, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """True iff every subset of at most n directions is linearly independent."""
    U = np.asarray(directions, dtype=float)
    if U.size == 0:
        raise EmptyInput("no directions")
    N, n = U.shape
    # subsets of an independent set are independent, so size min(N, n) suffices
    k = min(N, n)
    for S in combinations(range(N), k):
        if _rank(U[list(S)], tol.rank) < k:
            return False
    return True


def satisfies_existence_hypothesis(measure: DiscreteMeasure,
                                   tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Not hemisphere-concentrated and no essential subspace."""
    if is_concentrated_on_closed_hemisphere(measure.directions, tol=tol):
        return False
    return not find_essential_subspaces(measure, tol=tol)
