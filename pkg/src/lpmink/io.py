"""JSON instance and result files, and random instance generation.

Instance file::

    {"p": -1.5, "dim": 2, "directions": [[1, 0], ...], "weights": [2.0, ...],
     "opts": {"theta": 0.5, ...}}

``opts`` is optional. Result files hold the serialized SolveResult plus
the instance, so ``verify`` can rebuild everything from one file.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .config import SolverOptions
from .errors import InvalidMeasure, RejectionLimitExceeded
from .measure import DiscreteMeasure, build_measure, satisfies_existence_hypothesis
from .polytope import build_polytope
from .verify import SolveResult

__all__ = ["Instance", "load_instance", "parse_instance", "instance_to_dict", "dumps",
           "result_to_dict", "result_from_dict", "generate_instance"]

MAX_DRAWS = 10**4

PathLike = Union[str, Path]


@dataclass
class Instance:
    p: float
    measure: DiscreteMeasure
    opts: SolverOptions = field(default_factory=SolverOptions)


def parse_instance(data: dict) -> Instance:
    """Validate an instance dictionary.

    Raises
    ------
    InvalidMeasure
        Missing keys, p >= 0, or a measure ``build_measure`` rejects.
    """
    if not isinstance(data, dict):
        raise InvalidMeasure("instance must be a JSON object")
    missing = [k for k in ("p", "dim", "directions", "weights") if k not in data]
    if missing:
        raise InvalidMeasure(f"instance is missing keys {missing}")
    try:
        p = float(data["p"])
    except (TypeError, ValueError):
        raise InvalidMeasure(f"p must be a number, got {data['p']!r}") from None
    if not p < 0:
        raise InvalidMeasure(
            f"p = {p:g} is outside the supported regime: this solver handles p < 0 only")
    try:
        opts = SolverOptions.from_dict(data.get("opts"))
    except (TypeError, ValueError) as exc:
        raise InvalidMeasure(f"bad opts: {exc}") from None
    try:
        measure = build_measure(data["dim"], data["directions"], data["weights"],
                                opts.tolerances)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidMeasure):
            raise
        raise InvalidMeasure(str(exc)) from None
    return Instance(p=p, measure=measure, opts=opts)


def load_instance(path: PathLike) -> Instance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidMeasure(f"{path}: not valid JSON ({exc})") from None
    return parse_instance(data)


def instance_to_dict(p: float, measure: DiscreteMeasure,
                     opts: Optional[SolverOptions] = None) -> dict:
    d = {"p": float(p), **measure.to_dict()}
    if opts is not None:
        d["opts"] = opts.to_dict()
    return d


def dumps(obj) -> str:
    """Stable JSON text: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def result_to_dict(result: SolveResult, measure: DiscreteMeasure) -> dict:
    return {"instance": instance_to_dict(result.p, measure), "result": result.to_dict()}


def result_from_dict(data: dict):
    """Rebuild ``(SolveResult, Instance)`` from :func:`result_to_dict` output.

    Geometry is recomputed from the stored support numbers; only scalar
    diagnostics are taken from the file.
    """
    inst = parse_instance(data["instance"])
    r = data["result"]
    U = inst.measure.directions
    tol = inst.opts.tolerances
    crit = build_polytope(U, r["polytope_critical"]["support_numbers"], tol, check_bounded=False)
    sol = build_polytope(U, r["polytope_solution"]["support_numbers"], tol, check_bounded=False)
    res = SolveResult(
        p=inst.p, polytope_critical=crit, polytope_solution=sol,
        achieved_weights=np.asarray(r["achieved_weights"], float),
        max_rel_error=float(r["max_rel_error"]), objective=float(r["objective"]),
        iterations=int(r["iterations"]),
        stationarity_residual=float(r["stationarity_residual"]),
        first_order_residual=float(r["first_order_residual"]),
        facet_flags=np.asarray(r["facet_flags"], bool),
        warnings=list(r.get("warnings", [])), scheme_counts=dict(r.get("scheme_counts", {})))
    return res, inst


def generate_instance(n: int, N: int, p: float, seed: int) -> Instance:
    """Random instance satisfying the existence hypothesis.

    Draws N directions uniformly on the sphere until the set is not
    concentrated on a closed hemisphere and has no essential subspace,
    then draws weights log-uniformly in [0.1, 10].

    Raises
    ------
    RejectionLimitExceeded
        No acceptable direction set within 10^4 draws.
    """
    if not p < 0:
        raise InvalidMeasure(f"p must be negative, got {p}")
    if N < n + 1:
        raise InvalidMeasure(f"need N >= n + 1 directions, got N={N}, n={n}")
    rng = np.random.default_rng(seed)
    for _ in range(MAX_DRAWS):
        U = rng.normal(size=(N, n))
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        try:
            m = build_measure(n, U, np.ones(N))
        except InvalidMeasure:
            continue
        if m.size == N and satisfies_existence_hypothesis(m):
            break
    else:
        raise RejectionLimitExceeded(f"no admissible direction set in {MAX_DRAWS} draws")
    w = np.exp(rng.uniform(np.log(0.1), np.log(10.0), N))
    return Instance(p=float(p), measure=build_measure(n, U, w))
