"""Rescaling the critical polytope and checking the measure equation.

Verification never trusts geometry cached by the solver: it rebuilds the
polytope from (directions, support numbers) and recomputes facet areas.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import OriginNotInterior
from .inner import first_order_residual
from .measure import DiscreteMeasure
from .polytope import Polytope, build_polytope, scale

__all__ = [
    "SolveResult",
    "VerificationReport",
    "rescale_factor",
    "rescale_to_solution",
    "lp_surface_area_measure",
    "verify_solution",
]


@dataclass
class SolveResult:
    """Output of :func:`lpmink.outer.solve`.

    ``polytope_critical`` has volume one with xi = o; ``polytope_solution``
    is its dilation P_0 whose L_p surface area measure should equal the
    input measure.
    """

    p: float
    polytope_critical: Polytope
    polytope_solution: Polytope
    achieved_weights: np.ndarray
    max_rel_error: float
    objective: float
    iterations: int
    stationarity_residual: float
    first_order_residual: float
    facet_flags: np.ndarray
    warnings: List[str] = field(default_factory=list)
    objective_history: List[float] = field(default_factory=list, repr=False)  # ascent only
    scheme_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "polytope_critical": self.polytope_critical.to_dict(),
            "polytope_solution": self.polytope_solution.to_dict(),
            "achieved_weights": self.achieved_weights.tolist(),
            "max_rel_error": self.max_rel_error,
            "objective": self.objective,
            "iterations": self.iterations,
            "stationarity_residual": self.stationarity_residual,
            "first_order_residual": self.first_order_residual,
            "facet_flags": [bool(f) for f in self.facet_flags],
            "warnings": list(self.warnings),
            "scheme_counts": dict(self.scheme_counts),
        }


def rescale_factor(h_critical, weights, p: float, n: int) -> float:
    """``(sum_j alpha_j h_j^p / n)^(1/(n-p))``."""
    h = np.asarray(h_critical, dtype=float)
    return float((np.dot(weights, h ** p) / n) ** (1.0 / (n - p)))


def rescale_to_solution(P_critical: Polytope, measure: DiscreteMeasure, p: float) -> Polytope:
    lam = rescale_factor(P_critical.support_values, measure.weights, p, P_critical.dim)
    return scale(P_critical, lam)


def lp_surface_area_measure(P: Polytope, p: float) -> np.ndarray:
    """Atom weights ``h_k^(1-p) a_k`` of S_p(P, .) on the constraint normals."""
    if not P.contains_origin_interior:
        raise OriginNotInterior("the origin must lie in the interior of P")
    return P.support_values ** (1.0 - p) * P.facet_areas


@dataclass
class VerificationReport:
    passed: bool
    max_rel_error: float
    tol: float
    alpha: np.ndarray
    achieved: np.ndarray
    rel_errors: np.ndarray
    first_order: float
    stationarity: float
    cone_volume: float
    facet_flags: np.ndarray

    @property
    def worst_direction(self) -> int:
        return int(np.argmax(self.rel_errors))

    def to_dict(self) -> dict:
        return {
            "pass": bool(self.passed),
            "max_rel_error": float(self.max_rel_error),
            "per_direction": [
                {"k": k, "alpha": float(a), "achieved": float(s), "rel_error": float(e)}
                for k, (a, s, e) in enumerate(zip(self.alpha, self.achieved, self.rel_errors))
            ],
            "residuals": {
                "lemma33": float(self.first_order),
                "stationarity": float(self.stationarity),
                "cone_volume": float(self.cone_volume),
            },
            "facet_flags": [bool(f) for f in self.facet_flags],
        }


def _stationarity(h, areas, weights, p, n) -> float:
    lhs = weights * h ** (p - 1.0)
    c = float(np.dot(weights, h ** p)) / n
    return float(np.max(np.abs(lhs - c * areas) / lhs))


def verify_solution(result: SolveResult, measure: DiscreteMeasure, p: Optional[float] = None,
                    tol: float = 1e-6) -> VerificationReport:
    """Recompute S_p(P_0, .) from scratch and compare with the measure."""
    p = result.p if p is None else p
    n = measure.dim
    U = measure.directions
    alpha = measure.weights
    sol = build_polytope(U, result.polytope_solution.support_numbers,
                         result.polytope_solution.tolerances, check_bounded=False)
    try:
        achieved = lp_surface_area_measure(sol, p)
    except OriginNotInterior:
        achieved = np.full(len(alpha), np.nan)
    rel = np.abs(achieved - alpha) / alpha
    rel = np.where(np.isfinite(rel), rel, np.inf)
    cone = abs(float(np.dot(sol.support_values, sol.facet_areas)) / n - sol.volume) / sol.volume

    crit = build_polytope(U, result.polytope_critical.support_numbers,
                          result.polytope_critical.tolerances, check_bounded=False)
    r1 = first_order_residual(U, crit.support_values, np.zeros(n), alpha, p)
    stat = _stationarity(crit.support_values, crit.facet_areas, alpha, p, n)
    max_err = float(rel.max())
    return VerificationReport(
        passed=bool(max_err <= tol), max_rel_error=max_err, tol=tol, alpha=alpha.copy(),
        achieved=achieved, rel_errors=rel, first_order=r1, stationarity=stat,
        cone_volume=cone, facet_flags=sol.facet_flags)
