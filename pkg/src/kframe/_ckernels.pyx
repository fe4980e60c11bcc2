# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Mirrors ``_pykernels`` signature for signature."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def sqrtm_upper(const double complex[:, ::1] U):
    """Square root of an upper-triangular matrix with principal diagonal roots."""
    cdef Py_ssize_t n = U.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double complex s
    R_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] R = R_arr
    diag = np.sqrt(np.asarray(U).diagonal())
    cdef double complex[::1] d = diag
    for j in range(n):
        R[j, j] = d[j]
        for i in range(j - 1, -1, -1):
            s = U[i, j]
            for k in range(i + 1, j):
                s = s - R[i, k] * R[k, j]
            R[i, j] = s / (R[i, i] + R[j, j])
    return R_arr


def signed_cross_sum(const double complex[:, ::1] A,
                     const double complex[:, ::1] B,
                     const double[::1] sigma,
                     const double[::1] signature,
                     const double complex[::1] f):
    """Return sum_i sigma_i [f, a_i] b_i, columns a_i of A and b_i of B."""
    cdef Py_ssize_t dim = A.shape[0]
    cdef Py_ssize_t n = A.shape[1]
    cdef Py_ssize_t i, k
    cdef double complex c
    out_arr = np.zeros(dim, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    for i in range(n):
        c = 0
        for k in range(dim):
            c = c + signature[k] * f[k] * A[k, i].conjugate()
        c = c * sigma[i]
        for k in range(dim):
            out[k] = out[k] + c * B[k, i]
    return out_arr
