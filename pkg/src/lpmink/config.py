"""Centralized numerical tolerances.

Every degeneracy decision in the package reads from one of these records,
so a single object controls how near-coincident directions, singular
constraint subsets and vanishing facets are treated.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    unit_norm: float = 1e-12        # |‖u‖ - 1| allowed for "already unit"
    angular: float = 1e-10          # duplicate-direction merge threshold
    rank: float = 1e-10             # singular-value cutoff for rank tests
    projector: float = 1e-9         # subspace dedupe, Frobenius distance
    subspace_member: float = 1e-10  # projection residual for membership
    feasibility: float = 1e-9       # vertex v.u_k <= h_k + tol
    vertex_merge: float = 1e-8      # vertex dedupe distance
    facet_rel: float = 1e-10        # facet threshold = facet_rel * diam**(n-1)
    slack_floor_rel: float = 1e-14  # slack floor = slack_floor_rel * diam
    hemisphere_lp: float = 1e-10    # t* must exceed this to count as > 0


DEFAULT_TOLERANCES = Tolerances()


@dataclass
class SolverOptions:
    """Options for :func:`lpmink.outer.solve`.

    ``inner_tol`` of ``None`` selects the scale-aware default
    ``1e-10 * value / diameter``.
    """

    theta: float = 0.5
    outer_tol: float = 1e-8
    inner_tol: Optional[float] = None
    max_outer_iters: int = 5000
    max_inner_iters: int = 200
    diameter_cap: float = 1e6
    seed_h: Optional[np.ndarray] = None
    polish: bool = True
    require_all_facets: bool = True
    tolerances: Tolerances = field(default_factory=Tolerances)

    def with_updates(self, **kwargs) -> "SolverOptions":
        return replace(self, **kwargs)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "outer_tol": self.outer_tol,
            "inner_tol": self.inner_tol,
            "max_outer_iters": self.max_outer_iters,
            "diameter_cap": self.diameter_cap,
            "seed_h": None if self.seed_h is None else [float(x) for x in self.seed_h],
        }

    @classmethod
    def from_dict(cls, data: Optional[dict]) -> "SolverOptions":
        data = dict(data or {})
        known = {"theta", "outer_tol", "inner_tol", "max_outer_iters",
                 "max_inner_iters", "diameter_cap", "seed_h", "polish"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown solver options: {sorted(unknown)}")
        if data.get("seed_h") is not None:
            data["seed_h"] = np.asarray(data["seed_h"], dtype=float)
        return cls(**data)
