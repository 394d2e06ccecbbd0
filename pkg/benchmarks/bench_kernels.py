"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 20]

Times vertex enumeration and the Phi value/gradient/Hessian kernel on
random instances of a few sizes, checks the two backends agree, and
finishes with one end-to-end solve per backend.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from lpmink import _kernels_py

try:
    from lpmink import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None

SIZES = [(2, 8), (3, 7), (3, 12), (4, 10)]


def _instance(n, N, rng):
    U = rng.normal(size=(N, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    h = rng.uniform(0.5, 1.5, N)
    return U, h


def _time(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    print(f"{'n':>2} {'N':>3} {'kernel':<18} {'python [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for n, N in SIZES:
        U, h = _instance(n, N, rng)
        args = (U, h, 1e-10, 1e-9, 1e-8)
        Vp = _kernels_py.enumerate_vertices(*args)
        tp = _time(lambda: _kernels_py.enumerate_vertices(*args), repeat)
        line = f"{n:>2} {N:>3} {'vertices':<18} {tp * 1e3:12.3f}"
        if _kernels_cy is not None:
            Vc = _kernels_cy.enumerate_vertices(*args)
            same = Vp.shape == Vc.shape and np.allclose(
                np.sort(Vp, axis=0), np.sort(Vc, axis=0), atol=1e-10)
            tc = _time(lambda: _kernels_cy.enumerate_vertices(*args), repeat)
            line += f" {tc * 1e3:12.3f} {tp / tc:8.1f}" + ("" if same else "  MISMATCH")
        print(line)

        xi = np.zeros(n)
        alpha = rng.uniform(0.1, 10, N)
        pargs = (U, h, xi, alpha, -1.5)
        tp = _time(lambda: _kernels_py.phi_terms(*pargs), repeat * 50)
        line = f"{n:>2} {N:>3} {'phi+grad+hess':<18} {tp * 1e3:12.4f}"
        if _kernels_cy is not None:
            a, b = _kernels_py.phi_terms(*pargs), _kernels_cy.phi_terms(*pargs)
            same = np.isclose(a[0], b[0], rtol=1e-12) and np.allclose(a[2], b[2], rtol=1e-10)
            tc = _time(lambda: _kernels_cy.phi_terms(*pargs), repeat * 50)
            line += f" {tc * 1e3:12.4f} {tp / tc:8.1f}" + ("" if same else "  MISMATCH")
        print(line)


SOLVE_SNIPPET = """
import time, warnings
warnings.simplefilter("ignore")
from lpmink.io import generate_instance
from lpmink.outer import solve
from lpmink.kernels import BACKEND
inst = generate_instance(3, 7, -2.0, 3)
t = time.perf_counter()
r = solve(inst.measure, inst.p)
print(f"{BACKEND:<7} solve 3D N=7: {time.perf_counter() - t:.3f} s, {r.iterations} iterations")
"""


def bench_solve():
    for backend in ("python", "cython"):
        env = dict(os.environ, LPMINK_KERNELS=backend)
        out = subprocess.run([sys.executable, "-c", SOLVE_SNIPPET], env=env,
                             capture_output=True, text=True)
        print(out.stdout.strip() or out.stderr.strip())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if _kernels_cy is None:
        print("compiled extension not built; timing the numpy backend only")
    bench_kernels(args.repeat)
    print()
    bench_solve()


if __name__ == "__main__":
    main()
