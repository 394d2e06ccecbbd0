"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``LPMINK_KERNELS=python`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("LPMINK_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

enumerate_vertices = _impl.enumerate_vertices
phi_terms = _impl.phi_terms

__all__ = ["BACKEND", "enumerate_vertices", "phi_terms"]
