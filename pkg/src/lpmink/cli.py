"""Command-line front end: ``lpmink {check,solve,verify,gen,report}``.

Exit codes
----------
check   0 hypothesis holds, 1 it fails, 2 unreadable or invalid file
solve   0 verified, 1 solved but verification failed or a facet vanished,
        2 invalid input, 3 diameter divergence, 4 iteration limit
verify  0 pass, 1 fail, 2 unreadable file
gen     0 written, 2 bad arguments or rejection limit
report  0 written, 2 unreadable file

Set LPMINK_LOG to quiet, info or trace for progress output on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .errors import (
    DiameterDivergence,
    FacetLoss,
    InvalidMeasure,
    LpMinkowskiError,
    MaxIterationsExceeded,
    RejectionLimitExceeded,
    UnboundedIntersection,
)
from .io import (
    dumps,
    generate_instance,
    instance_to_dict,
    load_instance,
    result_from_dict,
    result_to_dict,
)
from .measure import (
    find_essential_subspaces,
    is_concentrated_on_closed_hemisphere,
    is_in_general_position,
)
from .outer import solve
from .verify import verify_solution

log = logging.getLogger("lpmink")

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_DIVERGED, EXIT_MAXITER = 0, 1, 2, 3, 4


def _setup_logging() -> None:
    level = os.environ.get("LPMINK_LOG", "quiet").lower()
    if level not in LOG_LEVELS:
        print(f"warning: LPMINK_LOG={level!r} not one of {sorted(LOG_LEVELS)}; using quiet",
              file=sys.stderr)
        level = "quiet"
    logging.basicConfig(level=LOG_LEVELS[level], stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s", force=True)
    if level == "quiet":
        warnings.simplefilter("ignore", RuntimeWarning)


def _write(text: str, out: Optional[str]) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------- check

def cmd_check(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, InvalidMeasure) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    m = inst.measure
    hemi = is_concentrated_on_closed_hemisphere(m.directions, tol=inst.opts.tolerances)
    gp = is_in_general_position(m.directions, inst.opts.tolerances)
    print(f"directions: {m.size} in R^{m.dim}")
    print(f"concentrated on a closed hemisphere: {'yes' if hemi else 'no'}")
    print(f"general position: {'yes' if gp else 'no'}")
    ess = find_essential_subspaces(m, tol=inst.opts.tolerances)
    if not ess:
        print("essential subspaces: none")
    else:
        print(f"essential subspaces: {len(ess)}")
        for s in ess:
            basis = np.array2string(s.basis, precision=6, suppress_small=True, separator=", ")
            print(f"  dim {s.dim_sub}, members {list(s.members)}, basis {' '.join(basis.split())}")
    return EXIT_OK if not hemi and not ess else EXIT_FAIL


# ---------------------------------------------------------------- solve

def _solve_one(path: str, out: Optional[str], overrides: dict) -> int:
    try:
        inst = load_instance(path)
    except (OSError, InvalidMeasure) as exc:
        print(f"{path}: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    opts = inst.opts.with_updates(**overrides) if overrides else inst.opts
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            result = solve(inst.measure, inst.p, opts)
    except UnboundedIntersection as exc:
        print(f"{path}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DiameterDivergence as exc:
        print(f"{path}: diameter divergence: {exc}. Iterates staying bounded depends on the "
              "measure having no essential subspace; run `check` on this instance.",
              file=sys.stderr)
        return EXIT_DIVERGED
    except MaxIterationsExceeded as exc:
        print(f"{path}: iteration limit: {exc}", file=sys.stderr)
        return EXIT_MAXITER
    except FacetLoss as exc:
        print(f"{path}: facet loss: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = verify_solution(result, inst.measure, tol=overrides.get("_verify_tol", 1e-6))
    payload = result_to_dict(result, inst.measure)
    payload["verification"] = report.to_dict()
    _write(dumps(payload), out)
    status = "pass" if report.passed else "FAIL"
    print(f"{path}: {status} max_rel_error={report.max_rel_error:.3e} "
          f"iterations={result.iterations}", file=sys.stderr)
    for w in result.warnings:
        print(f"{path}: note: {w}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_solve(args) -> int:
    overrides = {}
    if args.theta is not None:
        overrides["theta"] = args.theta
    if args.max_iters is not None:
        overrides["max_outer_iters"] = args.max_iters
    if args.tol is not None:
        overrides["outer_tol"] = args.tol
    paths = args.instance
    if len(paths) == 1:
        return _solve_one(paths[0], args.out, overrides)
    outdir = Path(args.out) if args.out else None
    if outdir is not None:
        outdir.mkdir(parents=True, exist_ok=True)
    outs = [str(outdir / (Path(p).stem + ".result.json")) if outdir else os.devnull
            for p in paths]
    if args.jobs and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            codes = list(ex.map(_solve_one, paths, outs, [overrides] * len(paths)))
    else:
        codes = [_solve_one(p, o, overrides) for p, o in zip(paths, outs)]
    return max(codes)


# ---------------------------------------------------------------- verify

def _load_result(path: str):
    data = json.loads(Path(path).read_text())
    return result_from_dict(data)


def cmd_verify(args) -> int:
    try:
        result, inst = _load_result(args.result)
    except (OSError, KeyError, ValueError, LpMinkowskiError) as exc:
        print(f"error: cannot read result {args.result}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = verify_solution(result, inst.measure, tol=args.tol if args.tol else 1e-6)
    _write(dumps(report.to_dict()), args.out)
    print(f"{'pass' if report.passed else 'FAIL'} max_rel_error={report.max_rel_error:.3e} "
          f"worst direction {report.worst_direction}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------- gen

def cmd_gen(args) -> int:
    try:
        inst = generate_instance(args.n, args.N, args.p, args.seed)
    except (InvalidMeasure, RejectionLimitExceeded) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _write(dumps(instance_to_dict(inst.p, inst.measure)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- report

def polytope_edges(P) -> List[tuple]:
    """Vertex index pairs joined by an edge of P."""
    n = P.dim
    inc = P.incidence[P.facet_flags]   # facets x vertices
    m = P.vertices.shape[0]
    if n == 2:
        ang = np.arctan2(*(P.vertices - P.vertices.mean(axis=0)).T[::-1])
        order = np.argsort(ang)
        return [(int(order[i]), int(order[(i + 1) % m])) for i in range(m)]
    U = P.directions[P.facet_flags]
    edges = []
    for i in range(m):
        for j in range(i + 1, m):
            common = inc[:, i] & inc[:, j]
            if common.sum() >= n - 1 and np.linalg.matrix_rank(U[common], 1e-9) == n - 1:
                edges.append((i, j))
    return edges


def _svg(P, report) -> str:
    V = P.vertices[:, :2]
    edges = polytope_edges(P)
    lo, hi = V.min(axis=0), V.max(axis=0)
    span = float(max(hi - lo)) or 1.0
    S = 360.0 / span

    def xy(v):
        return 20 + (v[0] - lo[0]) * S, 380 - (v[1] - lo[1]) * S

    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="820" height="400" '
             'viewBox="0 0 820 400">']
    if P.dim == 2:
        order = [a for a, _ in edges]
        pts = " ".join("%.4f,%.4f" % xy(V[k]) for k in order)
        parts.append(f'<polygon points="{pts}" fill="#dde8f5" stroke="#1f4e79" '
                     'stroke-width="1.5"/>')
    else:
        for a, b in edges:
            (x1, y1), (x2, y2) = xy(V[a]), xy(V[b])
            parts.append(f'<line x1="{x1:.4f}" y1="{y1:.4f}" x2="{x2:.4f}" y2="{y2:.4f}" '
                         'stroke="#1f4e79" stroke-width="1"/>')
    # residual bars on a log scale, 1e-16 .. 1
    err = np.clip(report.rel_errors, 1e-16, 1.0)
    width = 360.0 / max(len(err), 1)
    for k, e in enumerate(err):
        hgt = 360.0 * (16 + np.log10(e)) / 16
        x = 440 + k * width
        parts.append(f'<rect class="residual" x="{x:.3f}" y="{380 - hgt:.3f}" '
                     f'width="{0.8 * width:.3f}" height="{hgt:.3f}" fill="#c0504d">'
                     f'<title>k={k} rel_error={report.rel_errors[k]:.3e}</title></rect>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_report(args) -> int:
    try:
        result, inst = _load_result(args.result)
    except (OSError, KeyError, ValueError, LpMinkowskiError) as exc:
        print(f"error: cannot read result {args.result}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    report = verify_solution(result, inst.measure)
    P = result.polytope_solution
    prefix = args.out or Path(args.result).with_suffix("").as_posix()
    Path(prefix + ".svg").write_text(_svg(P, report))
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "alpha", "achieved", "rel_error"])
    for k in range(inst.measure.size):
        w.writerow([k, repr(float(report.alpha[k])), repr(float(report.achieved[k])),
                    repr(float(report.rel_errors[k]))])
    Path(prefix + "_residuals.csv").write_text(buf.getvalue())
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b"] + [f"x{i}" for i in range(P.dim)] + [f"y{i}" for i in range(P.dim)])
    for a, b in polytope_edges(P):
        w.writerow([a, b] + [repr(float(x)) for x in P.vertices[a]]
                   + [repr(float(x)) for x in P.vertices[b]])
    Path(prefix + "_edges.csv").write_text(buf.getvalue())
    print(f"wrote {prefix}.svg, {prefix}_residuals.csv, {prefix}_edges.csv", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpmink", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"lpmink {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="test the existence hypothesis of an instance")
    c.add_argument("instance")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("solve", help="solve one or more instances and verify")
    s.add_argument("instance", nargs="+")
    s.add_argument("--out", help="result JSON (a directory when several instances are given)")
    s.add_argument("--tol", type=float, help="stationarity tolerance (outer_tol)")
    s.add_argument("--theta", type=float, help="damping of the fixed-point scheme")
    s.add_argument("--max-iters", type=int, help="outer iteration limit")
    s.add_argument("--jobs", type=int, default=1, help="parallel workers for several instances")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="re-verify a result file from scratch")
    v.add_argument("result")
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--out", help="report JSON (default stdout)")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gen", help="draw a random instance satisfying the hypothesis")
    g.add_argument("n", type=int)
    g.add_argument("N", type=int)
    g.add_argument("p", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="instance JSON (default stdout)")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("report", help="SVG and CSV plot data for a result file")
    r.add_argument("result")
    r.add_argument("--out", help="output prefix (default: result path without suffix)")
    r.set_defaults(func=cmd_report)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
