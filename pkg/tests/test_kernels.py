import os
import subprocess
import sys

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from kframe import kernels

from conftest import seeds

try:
    CY = kernels.backend_module("cython")
except ImportError:
    CY = None
PY = kernels.backend_module("python")

needs_ext = pytest.mark.skipif(CY is None, reason="compiled extension not built")


def random_upper(rng, n):
    U = np.triu(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    d = rng.uniform(0.2, 3.0, n) * np.exp(1j * rng.uniform(-1.3, 1.3, n))
    U[np.diag_indices(n)] = d
    return U


@given(seeds, st.integers(1, 12))
def test_python_root_squares_back(seed, n):
    U = random_upper(np.random.default_rng(seed), n)
    R = PY.sqrtm_upper(U)
    assert np.allclose(np.tril(R, -1), 0)
    assert np.abs(R @ R - U).max() < 1e-10 * max(1.0, np.abs(U).max()) ** 2
    assert np.all(R.diagonal().real > 0)


def test_python_root_matches_scipy(rng):
    U = random_upper(rng, 6)
    assert np.allclose(PY.sqrtm_upper(U), scipy.linalg.sqrtm(U), atol=1e-10)


def test_empty_inputs():
    assert PY.sqrtm_upper(np.zeros((0, 0), complex)).shape == (0, 0)
    out = PY.signed_cross_sum(np.zeros((3, 0), complex), np.zeros((3, 0), complex),
                              np.zeros(0), np.ones(3), np.ones(3, complex))
    assert np.array_equal(out, np.zeros(3))


@needs_ext
@given(seeds, st.integers(0, 12))
def test_backends_agree_on_root(seed, n):
    U = random_upper(np.random.default_rng(seed), n)
    assert np.allclose(CY.sqrtm_upper(U), PY.sqrtm_upper(U), rtol=1e-13, atol=1e-13)


@needs_ext
@given(seeds, st.integers(1, 8), st.integers(0, 20))
def test_backends_agree_on_signed_sum(seed, dim, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((dim, n)) + 1j * rng.standard_normal((dim, n))
    B = rng.standard_normal((dim, n)) + 1j * rng.standard_normal((dim, n))
    sigma = rng.choice([-1.0, 1.0], n)
    sig = rng.choice([-1.0, 1.0], dim)
    f = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    ref = sum((sigma[i] * np.sum(sig * f * A[:, i].conj()) * B[:, i] for i in range(n)),
              np.zeros(dim, complex))
    for mod in (PY, CY):
        assert np.allclose(mod.signed_cross_sum(A, B, sigma, sig, f), ref, atol=1e-12 * (1 + n))


def test_wrappers_cast_inputs():
    U = np.triu(np.arange(1.0, 10.0).reshape(3, 3))
    R = kernels.sqrtm_upper(U)
    assert R.dtype == np.complex128 and np.allclose(R @ R, U)
    out = kernels.signed_cross_sum(np.eye(2), np.eye(2), [1, -1], [1, 1], [2, 3])
    assert np.allclose(out, [2, -3])


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.backend_module("fortran")


def test_backend_name():
    assert kernels.BACKEND in {"cython", "python"}
    assert kernels.BACKEND == ("cython" if CY is not None and not os.environ.get("KFRAME_PURE_PYTHON") else "python")


def test_env_var_forces_fallback():
    env = {**os.environ, "KFRAME_PURE_PYTHON": "1"}
    out = subprocess.run(
        [sys.executable, "-c", "import kframe; print(kframe.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
