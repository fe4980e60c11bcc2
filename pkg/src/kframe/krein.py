"""Finite-dimensional Krein spaces.

A Krein space here is ``C^dim`` with the indefinite product
``[x, y] = sum_i s_i x_i conj(y_i)`` for a signature ``s`` in {+1, -1}^dim.
The fundamental symmetry is ``J = diag(s)``, and the Hilbert product is the
ordinary Euclidean one. Subspaces carry Euclidean-orthonormal bases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import PreconditionError, RegularityError, ShapeError

__all__ = [
    "DEFAULT_RTOL",
    "Definiteness",
    "KreinSpace",
    "Subspace",
    "as_matrix",
    "as_vector",
    "classify_subspace",
    "indef_product",
    "is_j_positive",
    "is_maximal_definite",
    "j_adjoint",
    "j_companion",
    "j_positive_margin",
    "j_projection",
    "max_cross_product",
    "rank",
    "trivial_intersection",
    "uniform_constant",
]

DEFAULT_RTOL = 1e-9


def as_vector(x, dim=None):
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or (dim is not None and v.shape[0] != dim):
        raise ShapeError(f"expected a vector of length {dim}, got shape {v.shape}")
    return v


def as_matrix(A, shape=None):
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {M.shape}")
    if shape is not None and M.shape != tuple(shape):
        raise ShapeError(f"expected shape {tuple(shape)}, got {M.shape}")
    return M


def rank(A, rtol=DEFAULT_RTOL, atol=0.0):
    """Numerical rank: singular values above ``max(rtol * s_max, atol)``."""
    A = np.asarray(A)
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > max(rtol * s[0], atol)))


@dataclass(frozen=True)
class KreinSpace:
    """``C^dim`` with the indefinite product defined by ``signature``."""

    signature: tuple

    def __post_init__(self):
        sig = tuple(int(s) for s in self.signature)
        if not sig:
            raise ShapeError("a Krein space needs positive dimension")
        if any(s not in (1, -1) for s in sig):
            raise ShapeError(f"signature entries must be +1 or -1, got {self.signature!r}")
        object.__setattr__(self, "signature", sig)

    @classmethod
    def from_pq(cls, p, q):
        return cls((1,) * p + (-1,) * q)

    @classmethod
    def hilbert(cls, dim):
        return cls((1,) * dim)

    @property
    def dim(self):
        return len(self.signature)

    @property
    def p(self):
        return self.signature.count(1)

    @property
    def q(self):
        return self.signature.count(-1)

    @property
    def sig(self):
        return np.array(self.signature, dtype=np.float64)

    @property
    def J(self):
        return np.diag(self.sig).astype(np.complex128)

    def product(self, x, y):
        return indef_product(self, x, y)


def indef_product(sp, x, y):
    """``[x, y] = <Jx, y>``, linear in ``x`` and conjugate-linear in ``y``."""
    x = as_vector(x, sp.dim)
    y = as_vector(y, sp.dim)
    return complex(np.sum(sp.sig * x * np.conj(y)))


def j_adjoint(A, dom, cod=None):
    """Krein adjoint ``A+ = J_dom A* J_cod`` of ``A: dom -> cod``."""
    cod = dom if cod is None else cod
    A = as_matrix(A, (cod.dim, dom.dim))
    return (dom.sig[:, None] * A.conj().T) * cod.sig[None, :]


def j_positive_margin(X, space):
    """Smallest eigenvalue of the Hermitian part of ``J X`` relative to ``||X||``.

    ``X`` is J-positive exactly when this is nonnegative.
    """
    X = as_matrix(X, (space.dim, space.dim))
    H = space.sig[:, None] * X
    H = 0.5 * (H + H.conj().T)
    scale = np.linalg.norm(X, 2)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.eigvalsh(H)[0] / scale)


def is_j_positive(X, space, tol=DEFAULT_RTOL):
    return j_positive_margin(X, space) >= -tol


class Subspace:
    """Subspace of a Krein space stored through a Euclidean-orthonormal basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient, basis):
        B = as_matrix(basis)
        if B.shape[0] != ambient.dim:
            raise ShapeError(f"basis has {B.shape[0]} rows, ambient dim is {ambient.dim}")
        B.setflags(write=False)
        self.ambient = ambient
        self.basis = B

    @classmethod
    def span(cls, ambient, vectors, rtol=DEFAULT_RTOL, atol=0.0):
        """Span of the columns of ``vectors``, rank decided by SVD thresholds."""
        A = np.asarray(vectors, dtype=np.complex128).reshape(ambient.dim, -1)
        if A.shape[1] == 0:
            return cls.zero(ambient)
        U, s, _ = np.linalg.svd(A, full_matrices=False)
        if s[0] == 0.0:
            return cls.zero(ambient)
        k = int(np.count_nonzero(s > max(rtol * s[0], atol)))
        return cls(ambient, U[:, :k])

    @classmethod
    def zero(cls, ambient):
        return cls(ambient, np.zeros((ambient.dim, 0), dtype=np.complex128))

    @classmethod
    def full(cls, ambient):
        return cls(ambient, np.eye(ambient.dim, dtype=np.complex128))

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        """Orthogonal (Euclidean) projection onto the subspace."""
        return self.basis @ self.basis.conj().T

    def gram(self):
        """Indefinite Gram matrix ``B* J B`` of the stored basis."""
        return self.basis.conj().T @ (self.ambient.sig[:, None] * self.basis)

    def angles(self, other):
        """Principal angles, ascending. Empty when either subspace is zero."""
        if self.dim == 0 or other.dim == 0:
            return np.zeros(0)
        return np.sort(scipy.linalg.subspace_angles(self.basis, other.basis))

    def distance(self, other):
        """Largest principal angle; pi/2 when the dimensions differ."""
        if self.dim != other.dim:
            return np.pi / 2
        th = self.angles(other)
        return float(th[-1]) if th.size else 0.0

    def same_span(self, other, tol=1e-8):
        return self.distance(other) <= tol

    def containment_residual(self, other):
        """``sin`` of the largest angle between ``other`` and this subspace."""
        if other.dim == 0:
            return 0.0
        R = other.basis - self.basis @ (self.basis.conj().T @ other.basis)
        return float(np.linalg.norm(R, 2))

    def contains(self, other, tol=1e-8):
        return self.containment_residual(other) <= tol

    def sum(self, other, rtol=DEFAULT_RTOL):
        return Subspace.span(self.ambient, np.hstack([self.basis, other.basis]), rtol)

    def apply(self, A, rtol=DEFAULT_RTOL):
        """Image of the subspace under the square matrix ``A``."""
        return Subspace.span(self.ambient, A @ self.basis, rtol)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient.dim})"


class Definiteness(str, enum.Enum):
    UNIFORMLY_POSITIVE = "uniformly_positive"
    UNIFORMLY_NEGATIVE = "uniformly_negative"
    INDEFINITE_OR_DEGENERATE = "indefinite_or_degenerate"
    ZERO = "zero"


def uniform_constant(s):
    """Extreme eigenvalues ``(lambda_min, lambda_max)`` of the indefinite Gram.

    With an orthonormal basis, ``lambda_min`` is the best constant ``a`` in
    ``[x, x] >= a ||x||^2`` on ``s`` (and ``-lambda_max`` for the negative case).
    """
    if s.dim == 0:
        return 0.0, 0.0
    ev = np.linalg.eigvalsh(s.gram())
    return float(ev[0]), float(ev[-1])


def classify_subspace(s, tol=DEFAULT_RTOL):
    if tol <= 0:
        raise ValueError("tol must be positive")
    if s.dim == 0:
        return Definiteness.ZERO
    lo, hi = uniform_constant(s)
    if lo > tol:
        return Definiteness.UNIFORMLY_POSITIVE
    if hi < -tol:
        return Definiteness.UNIFORMLY_NEGATIVE
    return Definiteness.INDEFINITE_OR_DEGENERATE


def is_maximal_definite(s, tol=DEFAULT_RTOL):
    """Maximality of a uniformly definite subspace: its dimension is p (or q)."""
    cls = classify_subspace(s, tol)
    if cls is Definiteness.UNIFORMLY_POSITIVE:
        return s.dim == s.ambient.p
    if cls is Definiteness.UNIFORMLY_NEGATIVE:
        return s.dim == s.ambient.q
    raise PreconditionError(f"subspace is {cls.value}, not uniformly definite")


def j_companion(s, rtol=DEFAULT_RTOL):
    """``s^[perp]``: the Euclidean orthogonal complement of ``J s``."""
    if s.dim == 0:
        return Subspace.full(s.ambient)
    JB = s.ambient.sig[:, None] * s.basis
    N = scipy.linalg.null_space(JB.conj().T, rcond=rtol)
    return Subspace(s.ambient, N)


def trivial_intersection(a, b, tol=DEFAULT_RTOL):
    """True when ``a`` and ``b`` meet only in 0 (cosine of the smallest angle < 1 - tol)."""
    if a.dim == 0 or b.dim == 0:
        return True
    if a.dim + b.dim > a.ambient.dim:
        return False
    return float(np.cos(a.angles(b)[0])) < 1.0 - tol


def max_cross_product(a, b):
    """``max |[x, y]|`` over orthonormal basis vectors ``x`` of ``a``, ``y`` of ``b``."""
    if a.dim == 0 or b.dim == 0:
        return 0.0
    return float(np.abs(a.basis.conj().T @ (a.ambient.sig[:, None] * b.basis)).max())


def j_projection(s, tol=DEFAULT_RTOL):
    """J-selfadjoint projection onto a regular subspace ``s`` along ``s^[perp]``."""
    sp = s.ambient
    if s.dim == 0:
        return np.zeros((sp.dim, sp.dim), dtype=np.complex128)
    comp = j_companion(s)
    th = s.angles(comp)
    smallest = float(th[0]) if th.size else np.pi / 2
    if s.dim + comp.dim != sp.dim or smallest <= tol:
        raise RegularityError(
            f"subspace is degenerate: smallest principal angle to its J-companion is {smallest:.3e}",
            smallest,
        )
    G = s.gram()
    B = s.basis
    # E = B G^{-1} B* J
    return B @ np.linalg.solve(G, B.conj().T * sp.sig[None, :])
