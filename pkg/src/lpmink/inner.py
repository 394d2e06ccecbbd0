"""Interior minimizer of ``Phi_P(xi) = sum_k alpha_k (h(P,u_k) - xi.u_k)^p``.

For p < 0 each term is a strictly convex barrier in the slack, so Phi_P is
strictly convex on Int(P), blows up at the boundary and has a unique
minimizer. It is found by damped Newton steps; a fraction-to-boundary rule
keeps every slack above 5% of its current value in one step.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import BoundaryPoint, MaxIterationsExceeded
from .measure import DiscreteMeasure
from .polytope import Polytope

__all__ = ["InnerSolution", "phi", "phi_gradient", "phi_hessian", "minimize_phi",
           "first_order_residual"]

FRACTION_TO_BOUNDARY = 0.05
ARMIJO = 1e-4
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class InnerSolution:
    xi: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool = True


def _check_p(p: float) -> None:
    if not p < 0:
        raise ValueError(f"p must be negative, got {p}")


def _terms(P: Polytope, xi, measure: DiscreteMeasure, p: float):
    _check_p(p)
    xi = np.asarray(xi, dtype=float)
    value, grad, hess, smin = kernels.phi_terms(
        P.directions, P.support_values, xi, measure.weights, float(p))
    floor = P.tolerances.slack_floor_rel * P.diameter
    if not smin > floor:
        raise BoundaryPoint(f"minimum slack {smin:.3e} is below the floor {floor:.3e}")
    return value, grad, hess


def phi(P: Polytope, xi, measure: DiscreteMeasure, p: float) -> float:
    return _terms(P, xi, measure, p)[0]


def phi_gradient(P: Polytope, xi, measure: DiscreteMeasure, p: float) -> np.ndarray:
    """``-p * sum_k alpha_k s_k^(p-1) u_k`` with slacks s_k = h_k - xi.u_k."""
    return _terms(P, xi, measure, p)[1]


def phi_hessian(P: Polytope, xi, measure: DiscreteMeasure, p: float) -> np.ndarray:
    return _terms(P, xi, measure, p)[2]


def first_order_residual(U, h, xi, alpha, p: float) -> float:
    """Norm of ``sum_k alpha_k u_k / s_k^(1-p)``, zero at the minimizer."""
    s = np.asarray(h) - np.asarray(U) @ np.asarray(xi, dtype=float)
    return float(np.linalg.norm(np.asarray(U).T @ (np.asarray(alpha) * s ** (p - 1.0))))


def newton_minimize(U, h, alpha, p: float, xi0, tol: Optional[float], scale: float,
                    max_iter: int = 200, slack_floor: float = 0.0) -> InnerSolution:
    """Damped Newton on slack arrays; the workhorse behind :func:`minimize_phi`.

    ``tol`` of ``None`` means ``1e-10 * value / scale``.
    """
    xi = np.array(xi0, dtype=float)
    value, grad, hess, smin = kernels.phi_terms(U, h, xi, alpha, p)
    if not smin > slack_floor:
        raise BoundaryPoint(f"start point has slack {smin:.3e}")
    gnorm = float(np.linalg.norm(grad))
    for it in range(max_iter + 1):
        thresh = tol if tol is not None else 1e-10 * value / scale
        if gnorm <= thresh:
            return InnerSolution(xi, value, gnorm, it, True)
        if it == max_iter:
            break
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = -grad
        slope = float(grad @ step)
        if slope >= 0:
            step, slope = -grad, -gnorm ** 2
        s = h - U @ xi
        rate = U @ step
        shrink = rate > 0
        t = 1.0
        if shrink.any():
            t = min(1.0, (1.0 - FRACTION_TO_BOUNDARY) * float((s[shrink] / rate[shrink]).min()))
        while True:
            cand = xi + t * step
            v2, g2, H2, sm2 = kernels.phi_terms(U, h, cand, alpha, p)
            if sm2 > slack_floor:
                if v2 <= value + ARMIJO * t * slope:
                    break
                # near the minimizer the value is flat to rounding; judge by gradient
                if (abs(v2 - value) <= 64 * EPS * abs(value)
                        and np.linalg.norm(g2) < gnorm):
                    break
            t *= 0.5
            if t < 1e-16:
                # rounding floor: no representable decrease left
                converged = gnorm <= 1e3 * thresh
                return InnerSolution(xi, value, gnorm, it, converged)
        if np.array_equal(cand, xi):
            # the step no longer moves xi in floating point
            return InnerSolution(xi, value, gnorm, it, gnorm <= 1e3 * thresh)
        xi, value, grad, hess = cand, v2, g2, H2
        gnorm = float(np.linalg.norm(grad))
    raise MaxIterationsExceeded(
        f"inner Newton did not converge in {max_iter} iterations (|grad| = {gnorm:.3e})")


def minimize_phi(P: Polytope, measure: DiscreteMeasure, p: float,
                 inner_tol: Optional[float] = None, max_iter: int = 200,
                 xi0=None) -> InnerSolution:
    """Unique minimizer xi(P) of Phi_P over Int(P).

    Starts from the vertex centroid unless ``xi0`` is given. Terminates when
    the gradient norm drops below ``inner_tol`` (default
    ``1e-10 * Phi / diameter``).
    """
    _check_p(p)
    if P.directions.shape != measure.directions.shape or not np.allclose(
            P.directions, measure.directions, atol=1e-12):
        raise ValueError("polytope constraint normals must be the measure's directions")
    start = P.centroid if xi0 is None else np.asarray(xi0, dtype=float)
    floor = P.tolerances.slack_floor_rel * P.diameter
    return newton_minimize(P.directions, P.support_values, measure.weights, float(p),
                           start, inner_tol, P.diameter, max_iter, floor)
