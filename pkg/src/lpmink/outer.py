"""Maximization of ``inf_xi Phi_Q(xi)`` over polytopes Q with fixed normals
and unit volume.

The search runs over support vectors ``h``. Every iterate is normalized:
translate so the inner minimizer sits at the origin, then rescale to unit
volume. At a normalized state the relative gradient of the scale-free
objective ``F(h) = V(h)^(-p/n) * min_xi Phi`` is

    g_k = |p| (c a_k h_k - alpha_k h_k^p) / F,    c = sum_j alpha_j h_j^p / n,

(the inner minimizer's motion contributes nothing because the inner
gradient vanishes there). Critical points are where
``c h_k^(1-p) a_k = alpha_k`` for every k.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, replace
from typing import List, Optional

import numpy as np

from .config import SolverOptions
from .errors import (
    CombinatorialLimitExceeded,
    DiameterDivergence,
    EmptyInterior,
    FacetLoss,
    LpMinkowskiError,
    MaxIterationsExceeded,
    UnboundedIntersection,
)
from .inner import InnerSolution, first_order_residual, newton_minimize
from .measure import DiscreteMeasure, find_essential_subspaces, is_concentrated_on_closed_hemisphere
from .polytope import Polytope, build_polytope, scale, translate, volume_hessian
from .verify import SolveResult, lp_surface_area_measure, rescale_factor, rescale_to_solution

log = logging.getLogger(__name__)

__all__ = [
    "OuterState",
    "normalized_objective",
    "normalize",
    "stationarity_residual",
    "solve",
]

LOG_RATIO_CLIP = 5.0
THETA_MIN = 1e-10
TRUST_RADIUS = 1.0
MU_INIT = 1e-3
MU_DECREASE = 0.3
MU_INCREASE = 10.0
MU_MAX = 1e8
MONOTONE_SLACK = 1e-12
CAP_DEPTH = 1e-3
CAP_TRIES = 4
LM_MAX_ITERS = 300
LM_MU_INIT = 1e-3
LM_MU_MAX = 1e12
LM_RESTARTS = 8
LM_SPREAD = 0.3
STALL_WINDOW = 50
STALL_GAIN = 1e-10
POLISH_START = 1e-2
POLISH_TARGET = 0.1


@dataclass(frozen=True)
class OuterState:
    h: np.ndarray
    objective: float
    stationarity_residual: float
    residual_vector: np.ndarray
    facet_flags: np.ndarray
    diameter: float
    iteration: int
    polytope: Polytope
    inner: InnerSolution


def _inner(P: Polytope, measure: DiscreteMeasure, p: float, opts: SolverOptions) -> InnerSolution:
    floor = P.tolerances.slack_floor_rel * P.diameter
    return newton_minimize(P.directions, P.support_values, measure.weights, p, P.centroid,
                           opts.inner_tol, P.diameter, opts.max_inner_iters, floor)


def normalized_objective(h, measure: DiscreteMeasure, p: float,
                         opts: Optional[SolverOptions] = None):
    """``V(h)^(-p/n) * Phi_{P(h)}(xi(P(h)))`` and the inner solution.

    This is the value of the unit-volume rescaling of P(h), so it is
    unchanged under h -> lambda h.
    """
    opts = opts or SolverOptions()
    P = build_polytope(measure.directions, h, opts.tolerances, check_bounded=False)
    inner = _inner(P, measure, p, opts)
    return P.volume ** (-p / measure.dim) * inner.value, inner


def _residuals(h, areas, weights, p, n):
    lhs = weights * h ** (p - 1.0)
    c = float(np.dot(weights, h ** p)) / n
    vec = lhs - c * areas
    return float(np.max(np.abs(vec) / lhs)), vec, c


def stationarity_residual(h, measure: DiscreteMeasure, p: float, areas=None,
                          opts: Optional[SolverOptions] = None):
    """Max relative violation of ``alpha_k h_k^(p-1) = c a_k`` and the raw vector.

    ``h`` must already describe a normalized polytope (xi = o, V = 1).
    Facet areas are recomputed unless supplied.
    """
    h = np.asarray(h, dtype=float)
    if areas is None:
        opts = opts or SolverOptions()
        areas = build_polytope(measure.directions, h, opts.tolerances,
                               check_bounded=False).facet_areas
    res, vec, _ = _residuals(h, np.asarray(areas), measure.weights, p, measure.dim)
    return res, vec


def _normalize_once(h, measure: DiscreteMeasure, p: float, opts: SolverOptions,
                    iteration: int) -> OuterState:
    n = measure.dim
    P = build_polytope(measure.directions, h, opts.tolerances, check_bounded=False)
    inner = _inner(P, measure, p, opts)
    F = P.volume ** (-p / n) * inner.value
    Pn = scale(translate(P, -inner.xi), P.volume ** (-1.0 / n))
    hs = Pn.support_values
    Pn = replace(Pn, support_numbers=hs)
    res, vec, _ = _residuals(hs, Pn.facet_areas, measure.weights, p, n)
    return OuterState(hs, F, res, vec, Pn.facet_flags, Pn.diameter, iteration, Pn, inner)


def normalize(h, measure: DiscreteMeasure, p: float, opts: SolverOptions,
              iteration: int = 0, cut_caps: bool = True) -> OuterState:
    """Build P(h), move its inner minimizer to the origin, rescale to V = 1.

    The returned ``h`` is the support vector of the normalized polytope, so
    redundant constraints touch it. With ``cut_caps``, every direction that
    does not support a facet gets a shallow cap cut off (its support number
    lowered by ``CAP_DEPTH * diameter``); cutting a cap raises the objective
    to first order while the volume changes only at order n, and it puts
    the iterate back where the objective is differentiable. The cut is kept
    only if the objective did not decrease.
    """
    state = _normalize_once(h, measure, p, opts, iteration)
    if not cut_caps or state.facet_flags.all():
        return state
    depth = CAP_DEPTH
    for _ in range(CAP_TRIES):
        h_cut = state.h.copy()
        h_cut[~state.facet_flags] -= depth * state.diameter
        try:
            cut = _normalize_once(h_cut, measure, p, opts, iteration)
        except LpMinkowskiError:
            cut = None
        if cut is not None and cut.objective >= state.objective * (1 - MONOTONE_SLACK):
            return cut
        depth *= 0.1
    return state


def _ascent_step(state: OuterState, measure: DiscreteMeasure, p: float, theta: float,
                 scheme: str) -> np.ndarray:
    h = state.h
    a = state.polytope.facet_areas
    alpha = measure.weights
    c = float(np.dot(alpha, h ** p)) / measure.dim
    if scheme == "multiplicative":
        # log of achieved/target; its sign matches dF/dlog h_k componentwise
        with np.errstate(divide="ignore"):
            lr = np.log(c * h ** (1.0 - p) * a / alpha)
        lr = np.clip(lr, -LOG_RATIO_CLIP, LOG_RATIO_CLIP)
        return h * np.exp(theta * lr / (1.0 - p))
    g = -p * (c * a * h - alpha * h ** p) / state.objective
    return h * np.exp(theta * g)


def objective_derivatives(state: OuterState, measure: DiscreteMeasure, p: float):
    """Gradient and Hessian of ``log F`` in log-support coordinates.

    Evaluated at a normalized state (xi = o, V = 1) where the slacks are the
    support numbers. The inner minimizer's dependence on h enters the
    Hessian through the Schur complement ``D - D U (U^T D U)^-1 U^T D``.
    Translations are an exact null space; the scale direction is not, but
    the gradient is orthogonal to both.
    """
    n = measure.dim
    U = measure.directions
    alpha = measure.weights
    h = state.h
    a = state.polytope.facet_areas
    phi = state.objective
    w = p * alpha * h ** (p - 1.0)
    grad_h = (-p / n) * a + w / phi
    D = p * (p - 1.0) * alpha * h ** (p - 2.0)
    DU = D[:, None] * U
    H_phi = np.diag(D) - DU @ np.linalg.solve(U.T @ DU, DU.T)
    H_h = ((-p / n) * (volume_hessian(state.polytope) - np.outer(a, a))
           + H_phi / phi - np.outer(w, w) / phi ** 2)
    g = h * grad_h
    H = h[:, None] * H_h * h[None, :] + np.diag(g)
    return g, H


def _newton_direction(g: np.ndarray, H: np.ndarray, mu: float) -> np.ndarray:
    # saddle-free damped Newton: |eigenvalues| keep every component ascending
    lam, V = np.linalg.eigh(-0.5 * (H + H.T))
    coef = (V.T @ g) / (np.abs(lam) + mu)
    d = V @ coef
    norm = float(np.linalg.norm(d, np.inf))
    if norm > TRUST_RADIUS:
        d *= TRUST_RADIUS / norm
    return d


def _try(h, measure, p, opts, iteration) -> Optional[OuterState]:
    try:
        return normalize(h, measure, p, opts, iteration)
    except (EmptyInterior, MaxIterationsExceeded, LpMinkowskiError, np.linalg.LinAlgError):
        return None


def measure_newton(h0, measure: DiscreteMeasure, p: float, opts: SolverOptions,
                   target: float, max_iter: int = 50,
                   alpha: Optional[np.ndarray] = None) -> Optional[np.ndarray]:
    """Newton's method on ``log(h_k^(1-p) a_k(h)) = log(alpha_k)`` in log h.

    The Jacobian is ``(1-p) I + diag(1/a) (da/dh) diag(h)`` with the exact
    volume Hessian. A root is a solution P_0 directly; its inner minimizer
    is automatically the origin because ``sum_k a_k u_k = 0``. Returns the
    support vector reaching ``target`` relative error, or ``None`` when a
    step cannot reduce the residual while keeping all facets. ``alpha``
    overrides the measure's weights.
    """
    alpha = measure.weights if alpha is None else np.asarray(alpha, dtype=float)
    U = measure.directions

    def evaluate(y):
        try:
            P = build_polytope(U, np.exp(y), opts.tolerances, check_bounded=False)
        except LpMinkowskiError:
            return None, None
        if not P.facet_flags.all() or not P.contains_origin_interior:
            return None, None
        return P, np.log(P.support_values ** (1.0 - p) * P.facet_areas / alpha)

    y = np.log(np.asarray(h0, dtype=float))
    P, r = evaluate(y)
    if P is None:
        return None
    for _ in range(max_iter):
        err = float(np.max(np.abs(np.expm1(r))))
        if err <= target:
            return P.support_values
        h = P.support_values
        J = (1.0 - p) * np.eye(len(y)) + (volume_hessian(P) * h[None, :]) / P.facet_areas[:, None]
        try:
            dy = np.linalg.solve(J, -r)
        except np.linalg.LinAlgError:
            return None
        norm0 = float(np.abs(r).max())
        t = 1.0
        for _ in range(30):
            P2, r2 = evaluate(y + t * dy)
            if P2 is not None and float(np.abs(r2).max()) < norm0:
                break
            t *= 0.5
        else:
            return None
        y, P, r = np.log(P2.support_values), P2, r2
    return P.support_values if float(np.max(np.abs(np.expm1(r)))) <= target else None


def measure_least_squares(h0, measure: DiscreteMeasure, p: float, opts: SolverOptions,
                          target: float, max_iter: int = LM_MAX_ITERS) -> Optional[np.ndarray]:
    """Levenberg-Marquardt on the residual ``log(h_k^(1-p) a_k(h) / alpha_k)``.

    Same residual and Jacobian as :func:`measure_newton`, but each step
    solves ``(J^T J + mu diag(J^T J)) dy = -J^T r`` and is kept only if it
    lowers ``|r|^2`` with every facet present. Much less sensitive to the
    starting point than plain Newton. Returns the support vector of a
    solution P_0 or ``None``.
    """
    U = measure.directions
    log_alpha = np.log(measure.weights)

    def evaluate(y):
        try:
            P = build_polytope(U, np.exp(y), opts.tolerances, check_bounded=False)
        except LpMinkowskiError:
            return None, None
        if not P.facet_flags.all() or not P.contains_origin_interior:
            return None, None
        return P, np.log(P.support_values ** (1.0 - p) * P.facet_areas) - log_alpha

    P, r = evaluate(np.log(np.asarray(h0, dtype=float)))
    if P is None:
        return None
    mu = LM_MU_INIT
    for _ in range(max_iter):
        if float(np.max(np.abs(np.expm1(r)))) <= target:
            return P.support_values
        h = P.support_values
        J = (1.0 - p) * np.eye(len(h)) + (volume_hessian(P) * h[None, :]) / P.facet_areas[:, None]
        G = J.T @ J
        rhs = -J.T @ r
        f0 = float(r @ r)
        while True:
            try:
                dy = np.linalg.solve(G + mu * np.diag(np.diag(G)), rhs)
            except np.linalg.LinAlgError:
                return None
            P2, r2 = evaluate(np.log(h) + dy)
            if P2 is not None and float(r2 @ r2) < f0:
                P, r = P2, r2
                mu = max(mu / 3.0, 1e-12)
                break
            mu *= 4.0
            if mu > LM_MU_MAX:
                return None
    return None


def _polish(state: OuterState, measure: DiscreteMeasure, p: float,
            opts: SolverOptions) -> Optional[OuterState]:
    lam = rescale_factor(state.h, measure.weights, p, measure.dim)
    h = measure_newton(lam * state.h, measure, p, opts, POLISH_TARGET * opts.outer_tol)
    if h is None:
        return None
    cand = _try(h, measure, p, opts, state.iteration + 1)
    if cand is None or cand.stationarity_residual >= state.stationarity_residual:
        return None
    return cand


def _check_diameter(state: OuterState, opts: SolverOptions) -> None:
    if state.diameter > opts.diameter_cap:
        raise DiameterDivergence(
            f"iterate diameter {state.diameter:.3e} exceeds the cap {opts.diameter_cap:.3e} "
            "at unit volume; the measure may have an essential subspace")


class _Stalled(Exception):
    def __init__(self, state: OuterState, reason: str, limit: bool = False):
        super().__init__(reason)
        self.state = state
        self.limit = limit  # iteration budget spent: no fallback


def _ascend(state: OuterState, measure: DiscreteMeasure, p: float, opts: SolverOptions,
            scheme: str, history: List[float], counts: dict) -> OuterState:
    """Monotone ascent until the stationarity residual reaches ``outer_tol``.

    Raises ``_Stalled`` carrying the last state when the step size
    collapses, the objective stops improving, or the iteration budget ends.
    """
    theta_max = opts.theta
    theta = theta_max
    mu = None
    H = None
    accepted_run = 0
    polish_blocked_until = np.inf
    active = scheme
    it = state.iteration
    while state.stationarity_residual > opts.outer_tol:
        if it >= opts.max_outer_iters:
            raise _Stalled(state, f"outer iteration limit {opts.max_outer_iters} reached",
                           limit=True)
        if (len(history) > STALL_WINDOW and state.stationarity_residual > POLISH_START
                and history[-1] - history[-1 - STALL_WINDOW] <= STALL_GAIN * abs(history[-1])):
            raise _Stalled(state, f"objective flat over {STALL_WINDOW} accepted steps")
        it += 1
        if (opts.polish and state.stationarity_residual < min(POLISH_START, polish_blocked_until)
                and state.facet_flags.all()):
            cand = _polish(state, measure, p, opts)
            counts["polish"] += 1
            if cand is not None and cand.objective >= state.objective * (1 - MONOTONE_SLACK):
                _check_diameter(cand, opts)
                state = replace(cand, iteration=it)
                history.append(state.objective)
                continue
            polish_blocked_until = state.stationarity_residual * 0.1

        if active == "newton":
            g, H = objective_derivatives(state, measure, p)
            if mu is None:
                mu = MU_INIT * max(float(np.abs(H).max()), 1e-300)
            h_new = state.h * np.exp(_newton_direction(g, H, mu))
        else:
            h_new = _ascent_step(state, measure, p, theta, active)
        cand = _try(h_new, measure, p, opts, it)
        if cand is not None and cand.objective >= state.objective * (1 - MONOTONE_SLACK):
            _check_diameter(cand, opts)
            state = cand
            history.append(state.objective)
            counts[active] += 1
            accepted_run += 1
            if active == "newton":
                mu *= MU_DECREASE
            elif accepted_run >= 3 and theta < theta_max:
                theta = min(theta_max, 2 * theta)
                accepted_run = 0
        else:
            counts["rejected"] += 1
            accepted_run = 0
            if active == "newton":
                mu *= MU_INCREASE
                stalled = mu > MU_MAX * max(float(np.abs(H).max()), 1e-300)
            else:
                theta *= 0.5
                stalled = theta < THETA_MIN
            if stalled:
                if active == "gradient":
                    raise _Stalled(state, "ascent step size collapsed")
                log.info("%s steps collapsed at iteration %d; switching to gradient ascent",
                         active, it)
                active = "gradient"
                theta = theta_max
        log.debug("iter %d F=%.15g res=%.3e theta=%.2e mu=%s", it, state.objective,
                  state.stationarity_residual, theta, mu)
    return replace(state, iteration=it)


def solve(measure: DiscreteMeasure, p: float, opts: Optional[SolverOptions] = None,
          scheme: str = "newton") -> SolveResult:
    """Find a critical unit-volume polytope and dilate it into a solution.

    Ascent on the normalized objective starts from ``opts.seed_h`` (default
    all ones). ``scheme`` picks the step: ``"newton"`` (damped Newton with
    the exact Hessian), ``"multiplicative"`` (fixed-point update
    ``h_k *= (achieved_k / alpha_k)^(theta/(1-p))``) or ``"gradient"``;
    the first two fall back to gradient ascent when their steps collapse.
    Below residual 1e-2 a Newton polish on the measure equation is tried
    (disabled by ``opts.polish=False``).

    If the ascent stalls, the measure equation is solved directly by
    Levenberg-Marquardt from a few starts; a critical point found that way
    is returned with a warning since it need not be the maximizer.

    Raises
    ------
    UnboundedIntersection
        The directions are concentrated on a closed hemisphere.
    DiameterDivergence
        An iterate grew beyond ``opts.diameter_cap`` at unit volume.
    FacetLoss
        The iteration stopped with some direction not supporting a facet.
    MaxIterationsExceeded
        ``opts.max_outer_iters`` was reached, or the ascent stalled and the
        direct solve found nothing either.
    """
    if not p < 0:
        raise ValueError(f"p must be negative, got {p}")
    if scheme not in ("newton", "multiplicative", "gradient"):
        raise ValueError(f"unknown scheme {scheme!r}")
    opts = opts or SolverOptions()
    p = float(p)
    tol = opts.tolerances
    notes: List[str] = []
    if is_concentrated_on_closed_hemisphere(measure.directions, tol=tol):
        raise UnboundedIntersection("directions are concentrated on a closed hemisphere")
    try:
        ess = find_essential_subspaces(measure, tol=tol)
    except CombinatorialLimitExceeded as exc:
        ess = []
        notes.append(f"essential-subspace check skipped: {exc}")
    if ess:
        msg = (f"measure has {len(ess)} essential subspace(s); existence of a solution "
               "is not guaranteed")
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)

    h0 = np.ones(measure.size) if opts.seed_h is None else np.asarray(opts.seed_h, float)
    start = normalize(h0, measure, p, opts, 0)
    _check_diameter(start, opts)
    history = [start.objective]
    counts = {"newton": 0, "multiplicative": 0, "gradient": 0, "polish": 0,
              "rejected": 0, "least_squares": 0}
    try:
        state = _ascend(start, measure, p, opts, scheme, history, counts)
    except _Stalled as stall:
        log.info("ascent stalled (%s) at residual %.3e; solving the measure equation directly",
                 stall, stall.state.stationarity_residual)
        state = None
        if stall.limit:
            raise MaxIterationsExceeded(
                f"{stall} (stationarity residual {stall.state.stationarity_residual:.3e})"
            ) from None
        # every distinct unit direction supports a facet of {x : x.u_k <= 1}
        origins = [np.ones(measure.size)]
        if stall.state.facet_flags.all():
            origins.append(stall.state.h)
        rng = np.random.default_rng(0)
        origins += [np.exp(rng.normal(0.0, LM_SPREAD, measure.size)) for _ in range(LM_RESTARTS)]
        for origin in origins:
            lam = rescale_factor(origin, measure.weights, p, measure.dim)
            h = measure_least_squares(lam * origin, measure, p, opts,
                                      POLISH_TARGET * opts.outer_tol)
            counts["least_squares"] += 1
            if h is not None:
                state = replace(normalize(h, measure, p, opts, stall.state.iteration,
                                          cut_caps=False), iteration=stall.state.iteration)
                if state.stationarity_residual <= opts.outer_tol:
                    break
                state = None
        if state is None:
            last = stall.state
            if not last.facet_flags.all():
                raise FacetLoss(
                    f"directions {np.flatnonzero(~last.facet_flags).tolist()} do not support "
                    f"facets when the ascent stopped ({stall})") from None
            raise MaxIterationsExceeded(
                f"{stall} (stationarity residual {last.stationarity_residual:.3e}) and "
                "the direct solve failed") from None
        notes.append(f"ascent stalled ({stall}) at objective {stall.state.objective:.6g}; "
                     "critical point found by solving the measure equation directly, "
                     "maximality not certified")

    if opts.require_all_facets and not state.facet_flags.all():
        raise FacetLoss(f"directions {np.flatnonzero(~state.facet_flags).tolist()} "
                        "do not support facets at convergence")
    P_crit = state.polytope
    P_sol = rescale_to_solution(P_crit, measure, p)
    achieved = lp_surface_area_measure(P_sol, p)
    rel = np.abs(achieved - measure.weights) / measure.weights
    r1 = first_order_residual(measure.directions, P_crit.support_values, np.zeros(measure.dim),
                           measure.weights, p)
    log.info("converged in %d iterations, residual %.3e", state.iteration,
             state.stationarity_residual)
    return SolveResult(
        p=p, polytope_critical=P_crit, polytope_solution=P_sol, achieved_weights=achieved,
        max_rel_error=float(rel.max()), objective=state.objective, iterations=state.iteration,
        stationarity_residual=state.stationarity_residual, first_order_residual=r1,
        facet_flags=state.facet_flags, warnings=notes, objective_history=history,
        scheme_counts=counts)
