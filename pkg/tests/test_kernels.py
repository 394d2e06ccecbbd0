import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from lpmink import _kernels_py, kernels

cy = pytest.importorskip("lpmink._kernels")

BACKENDS = [pytest.param(_kernels_py, id="python"), pytest.param(cy, id="cython")]


def _case(seed, n, N):
    rng = np.random.default_rng(seed)
    U = rng.normal(size=(N, n))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    U = np.vstack([U, -U.sum(axis=0) / np.linalg.norm(U.sum(axis=0))])
    return U, rng.uniform(0.5, 1.5, len(U)), rng


def _sorted_rows(X):
    return X[np.lexsort(np.round(X, 8).T[::-1])]


@pytest.mark.parametrize("n, N", [(2, 7), (3, 8), (4, 9)])
def test_vertex_backends_agree(n, N):
    for seed in range(5):
        U, h, _ = _case(seed, n, N)
        a = _kernels_py.enumerate_vertices(U, h, 1e-10, 1e-9, 1e-8)
        b = cy.enumerate_vertices(U, h, 1e-10, 1e-9, 1e-8)
        assert a.shape == b.shape
        assert np.allclose(_sorted_rows(a), _sorted_rows(b), atol=1e-12)


@pytest.mark.parametrize("mod", BACKENDS)
def test_cube_vertices(mod):
    I = np.eye(3)
    V = mod.enumerate_vertices(np.vstack([I, -I]), np.ones(6), 1e-10, 1e-9, 1e-8)
    assert V.shape == (8, 3)
    assert np.allclose(np.abs(V), 1)


@pytest.mark.parametrize("mod", BACKENDS)
def test_degenerate_vertex_merged(mod):
    # square pyramid apex lies on four planes
    U = np.array([[0, 0, -1], [1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1.0]])
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    h = np.array([1, 0, 0, 0, 0.0]) + 1e-16
    V = mod.enumerate_vertices(U, h, 1e-10, 1e-9, 1e-8)
    assert len(V) == 5


@pytest.mark.parametrize("mod", BACKENDS)
def test_phi_terms(mod):
    U, h, rng = _case(3, 3, 6)
    alpha = rng.uniform(0.1, 5, len(h))
    xi = np.array([0.05, -0.03, 0.02])
    v, g, H, smin = mod.phi_terms(U, h, xi, alpha, -1.5)
    s = h - U @ xi
    assert v == pytest.approx((alpha * s ** -1.5).sum(), rel=1e-13)
    assert np.allclose(g, 1.5 * U.T @ (alpha * s ** -2.5), rtol=1e-12)
    assert np.allclose(H, -1.5 * -2.5 * (U.T * (alpha * s ** -3.5)) @ U, rtol=1e-12)
    assert smin == pytest.approx(s.min())


@pytest.mark.parametrize("mod", BACKENDS)
def test_phi_terms_outside(mod):
    U, h, rng = _case(1, 2, 5)
    v, g, H, smin = mod.phi_terms(U, h, 10 * U[0], np.ones(len(h)), -1.0)
    assert np.isnan(v) and g is None and smin < 0


def test_backend_selected():
    assert kernels.BACKEND == "cython"


def test_env_forces_python():
    out = subprocess.run(
        [sys.executable, "-c", "from lpmink.kernels import BACKEND; print(BACKEND)"],
        env=dict(os.environ, LPMINK_KERNELS="python"), capture_output=True, text=True)
    assert out.stdout.strip() == "python"
