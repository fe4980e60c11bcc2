"""Pure-Python reference versions of the compiled kernels."""

import numpy as np


def sqrtm_upper(U):
    """Square root of an upper-triangular matrix with principal diagonal roots."""
    n = U.shape[0]
    R = np.zeros((n, n), dtype=np.complex128)
    diag = np.sqrt(U.diagonal())
    for j in range(n):
        R[j, j] = diag[j]
        for i in range(j - 1, -1, -1):
            s = U[i, j] - R[i, i + 1:j] @ R[i + 1:j, j]
            R[i, j] = s / (R[i, i] + R[j, j])
    return R


def signed_cross_sum(A, B, sigma, signature, f):
    """Return sum_i sigma_i [f, a_i] b_i, columns a_i of A and b_i of B."""
    out = np.zeros(A.shape[0], dtype=np.complex128)
    weighted = signature * f
    for i in range(A.shape[1]):
        c = sigma[i] * np.vdot(A[:, i], weighted)
        out += c * B[:, i]
    return out
