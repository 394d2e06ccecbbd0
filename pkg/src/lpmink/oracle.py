"""Slow brute-force references used to cross-check the solver.

``oracle_outer`` maximizes the normalized objective with restarted
Nelder-Mead and never looks at derivatives; ``oracle_inner`` scans a grid
over a planar polygon. Both are meant for small instances only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .config import SolverOptions
from .errors import BudgetExceeded, LpMinkowskiError
from .measure import DiscreteMeasure
from .outer import normalized_objective
from .polytope import Polytope, build_polytope

__all__ = ["OracleResult", "oracle_outer", "oracle_inner"]

N_RESTARTS = 16
START_SPREAD = 1.0
N_SCREEN = 1024
REDUNDANCY_TILT = 1e-2


@dataclass(frozen=True)
class OracleResult:
    h_best: np.ndarray
    objective_best: float
    evaluations: int


def _simplex_point(z: np.ndarray) -> np.ndarray:
    # first coordinate pinned so the parametrization has no flat direction
    y = np.concatenate([[0.0], z])
    w = np.exp(y - y.max())
    return len(w) * w / w.sum()


def oracle_outer(measure: DiscreteMeasure, p: float, budget: int = 200_000,
                 seed: int = 0, opts: Optional[SolverOptions] = None) -> OracleResult:
    """Derivative-free maximization of the normalized objective.

    The search runs over support vectors on the simplex ``sum(h) = N``
    (the objective is scale invariant), parametrized by softmax
    coordinates. A seeded cloud of 1024 points is screened and the 16 best
    seed Nelder-Mead runs on ``-log F``, each restarted in place until it
    stops improving.

    Parameters
    ----------
    measure, p
        The problem. Intended for ``N <= 8`` and ``n <= 3``.
    budget
        Total number of objective evaluations allowed.
    seed
        Seed of the start generator; results are reproducible.

    Raises
    ------
    BudgetExceeded
        The evaluation budget ran out.
    """
    if measure.size > 8 or measure.dim > 3:
        raise ValueError("oracle_outer is limited to N <= 8 and n <= 3")
    opts = opts or SolverOptions()
    rng = np.random.default_rng(seed)
    count = 0

    def f(z):
        nonlocal count
        count += 1
        h = _simplex_point(z)
        try:
            P = build_polytope(measure.directions, h, opts.tolerances, check_bounded=False)
            F, _ = normalized_objective(h, measure, p, opts)
        except (LpMinkowskiError, np.linalg.LinAlgError):
            return np.inf
        if not (F > 0 and np.isfinite(F)):
            return np.inf
        # F ignores how far a redundant constraint sits beyond the body, which
        # leaves plateaus the simplex cannot leave; the tilt is zero once every
        # constraint touches
        excess = np.sum(h - P.support_values) / measure.size
        return -np.log(F) + REDUNDANCY_TILT * excess

    per_run = (budget - N_SCREEN) // (2 * N_RESTARTS)
    nm = {"xatol": 1e-10, "fatol": 1e-13, "adaptive": True}
    best = None
    # screen a cloud of candidates and start the simplex runs from the best
    cloud = rng.normal(0.0, START_SPREAD, (N_SCREEN, measure.size - 1))
    scores = np.array([f(z) for z in cloud])
    starts = cloud[np.argsort(scores, kind="stable")[:N_RESTARTS]]
    for z in starts:
        fz = f(z)
        # Nelder-Mead simplices collapse on the kinks where constraints turn
        # redundant, so keep restarting from the incumbent while it improves
        while True:
            if count >= budget:
                raise BudgetExceeded(f"oracle used all {budget} evaluations")
            res = minimize(f, z, method="Nelder-Mead",
                           options={**nm, "maxfev": min(per_run, budget - count)})
            gain = fz - res.fun
            if gain < 0:
                break
            z, fz = res.x, res.fun
            if gain <= 1e-12:
                break
        if best is None or fz < best[1]:
            best = (z, fz)
    h = _simplex_point(best[0])
    F, _ = normalized_objective(h, measure, p, opts)
    return OracleResult(h_best=h, objective_best=float(F), evaluations=count)


def _phi_on_points(P: Polytope, alpha, p, pts):
    s = P.support_values[None, :] - pts @ P.directions.T
    inside = np.all(s > 0, axis=1)
    val = np.full(len(pts), np.inf)
    val[inside] = (alpha[None, :] * s[inside] ** p).sum(axis=1)
    return val


def oracle_inner(P: Polytope, measure: DiscreteMeasure, p: float, grid: int = 1000) -> np.ndarray:
    """Grid argmin of Phi_P over a planar polygon.

    Scans the points ``lo + i * step`` (0 < i < grid) of the vertex bounding
    box, then scans a second grid of the same size over the 2 x 2 cells
    around the coarse argmin. Returns the best point found.
    """
    if P.dim != 2:
        raise ValueError("oracle_inner works in the plane only")
    if grid > 2000:
        raise ValueError("grid is limited to 2000 points per axis")
    alpha = measure.weights
    lo = P.vertices.min(axis=0)
    hi = P.vertices.max(axis=0)
    step = (hi - lo) / grid
    best_pt, best_val = None, np.inf
    # row blocks keep memory flat at grid=2000
    xs = lo[0] + step[0] * np.arange(1, grid)
    ys = lo[1] + step[1] * np.arange(1, grid)
    for i0 in range(0, len(xs), 200):
        X, Y = np.meshgrid(xs[i0:i0 + 200], ys, indexing="ij")
        pts = np.column_stack([X.ravel(), Y.ravel()])
        val = _phi_on_points(P, alpha, p, pts)
        j = int(np.argmin(val))
        if val[j] < best_val:
            best_val, best_pt = val[j], pts[j]
    fine = 2.0 * step / grid
    xs = best_pt[0] + fine[0] * np.arange(-grid // 2, grid // 2 + 1)
    ys = best_pt[1] + fine[1] * np.arange(-grid // 2, grid // 2 + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    val = _phi_on_points(P, alpha, p, pts)
    j = int(np.argmin(val))
    # the fine grid contains the coarse argmin, so this never gets worse
    return pts[j] if val[j] <= best_val else best_pt
