"""Backend selection for the hot loops.

The compiled extension is used when importable; setting the environment
variable ``KFRAME_PURE_PYTHON=1`` forces the Python fallback.
"""

import os

import numpy as np

from . import _pykernels

try:
    if os.environ.get("KFRAME_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

__all__ = ["BACKEND", "sqrtm_upper", "signed_cross_sum", "backend_module"]


def backend_module(name=None):
    """Return the kernel module for ``name`` ("cython" or "python"); default is active."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")


def sqrtm_upper(U):
    return _impl.sqrtm_upper(np.ascontiguousarray(U, dtype=np.complex128))


def signed_cross_sum(A, B, sigma, signature, f):
    return _impl.signed_cross_sum(
        np.ascontiguousarray(A, dtype=np.complex128),
        np.ascontiguousarray(B, dtype=np.complex128),
        np.ascontiguousarray(sigma, dtype=np.float64),
        np.ascontiguousarray(signature, dtype=np.float64),
        np.ascontiguousarray(f, dtype=np.complex128),
    )
