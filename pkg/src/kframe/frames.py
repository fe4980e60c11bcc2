"""Finite frame families over a Krein space.

A family is stored as its synthesis matrix: column ``i`` is ``f_i``. The
index set splits into ``I+`` (``[f_i, f_i] >= 0``) and ``I-`` (the rest);
near-neutral vectors are reported separately so callers can reject them.
"""

from __future__ import annotations

import warnings
from typing import NamedTuple

import numpy as np

from .errors import ShapeError
from .krein import DEFAULT_RTOL, KreinSpace, as_matrix, rank

__all__ = [
    "DEFAULT_NEUTRAL_TOL",
    "FrameBounds",
    "FrameFamily",
    "NearNeutralWarning",
    "excess",
    "frame_bounds",
    "similarity_witness",
    "synthesis",
    "synthesis_signed",
]

DEFAULT_NEUTRAL_TOL = 1e-9


class NearNeutralWarning(UserWarning):
    """A frame vector has ``|[f, f]|`` below the neutrality tolerance."""


class FrameFamily:
    """Ordered family ``{f_i}`` in a Krein space; duplicates allowed.

    Parameters
    ----------
    space : KreinSpace
    vectors : array_like
        ``dim x n`` matrix whose columns are the frame vectors.
    labels : sequence of str, optional
    neutral_tol : float
        ``f_i`` counts as neutral when ``|[f_i, f_i]| <= neutral_tol * ||f_i||^2``.
    """

    __slots__ = ("space", "vectors", "labels", "neutral_tol", "_products")

    def __init__(self, space, vectors, labels=None, neutral_tol=DEFAULT_NEUTRAL_TOL):
        T = np.asarray(vectors, dtype=np.complex128)
        if T.ndim == 1:
            T = T.reshape(space.dim, -1)
        if T.ndim != 2 or T.shape[0] != space.dim:
            raise ShapeError(f"frame vectors must form a {space.dim} x n matrix, got {T.shape}")
        T = T.copy()
        T.setflags(write=False)
        if labels is not None:
            labels = tuple(str(lbl) for lbl in labels)
            if len(labels) != T.shape[1]:
                raise ShapeError("one label per vector required")
        self.space = space
        self.vectors = T
        self.labels = labels
        self.neutral_tol = neutral_tol
        self._products = np.real(np.einsum("ki,k,ki->i", T, space.sig, T.conj()))

    @classmethod
    def from_list(cls, space, vectors, **kwargs):
        vecs = [np.asarray(v, dtype=np.complex128) for v in vectors]
        if not vecs:
            return cls(space, np.zeros((space.dim, 0)), **kwargs)
        return cls(space, np.column_stack(vecs), **kwargs)

    def __len__(self):
        return self.vectors.shape[1]

    def __iter__(self):
        return iter(self.vectors.T)

    def __getitem__(self, i):
        return self.vectors[:, i]

    def __repr__(self):
        return f"FrameFamily(n={len(self)}, signature={self.space.signature})"

    @property
    def n(self):
        return self.vectors.shape[1]

    @property
    def self_products(self):
        """``[f_i, f_i]`` for every index."""
        return self._products.copy()

    @property
    def signs(self):
        """``sigma_i``: +1 on ``I+`` (``[f_i, f_i] >= 0``), -1 on ``I-``."""
        return np.where(self._products >= 0.0, 1.0, -1.0)

    @property
    def plus(self):
        return np.flatnonzero(self._products >= 0.0)

    @property
    def minus(self):
        return np.flatnonzero(self._products < 0.0)

    def neutral_indices(self):
        norms2 = np.sum(np.abs(self.vectors) ** 2, axis=0)
        return np.flatnonzero(np.abs(self._products) <= self.neutral_tol * norms2)

    def warn_near_neutral(self):
        bad = self.neutral_indices()
        if bad.size:
            warnings.warn(f"near-neutral frame vectors at indices {bad.tolist()}",
                          NearNeutralWarning, stacklevel=2)
        return bad

    def coefficient_space(self):
        """``l2(I)`` with the signature ``P+ - P-`` induced by the partition."""
        return KreinSpace(tuple(int(s) for s in self.signs))

    def with_vectors(self, vectors):
        """Same space, labels and tolerance, new vectors."""
        return FrameFamily(self.space, vectors, self.labels, self.neutral_tol)

    def scaled(self, c):
        return self.with_vectors(c * self.vectors)

    def mapped(self, A):
        """The family ``{A f_i}``."""
        return self.with_vectors(as_matrix(A, (self.space.dim, self.space.dim)) @ self.vectors)


def synthesis(F):
    """``T``: the ``dim x n`` matrix with columns ``f_i``."""
    return np.array(F.vectors)


def synthesis_signed(F, sign):
    """``T P+`` (sign ``+1``/``"+"``) or ``T P-``: columns outside the block zeroed."""
    if sign in (1, "+", "plus"):
        keep = F.signs > 0
    elif sign in (-1, "-", "minus"):
        keep = F.signs < 0
    else:
        raise ValueError(f"sign must be '+' or '-', got {sign!r}")
    T = synthesis(F)
    T[:, ~keep] = 0.0
    return T


class FrameBounds(NamedTuple):
    alpha: float
    beta: float


def frame_bounds(F, rtol=DEFAULT_RTOL):
    """Optimal Hilbert-frame bounds from the spectrum of ``T T*``.

    Returns ``None`` when ``T`` is not surjective (not a frame).
    """
    T = F.vectors
    if F.n == 0 or rank(T, rtol) < F.space.dim:
        return None
    ev = np.linalg.eigvalsh(T @ T.conj().T)
    return FrameBounds(float(ev[0]), float(ev[-1]))


def excess(F, rtol=DEFAULT_RTOL):
    """``dim N(T) = n - rank(T)``."""
    return F.n - rank(F.vectors, rtol)


def similarity_witness(F, G, tol=1e-8, rtol=DEFAULT_RTOL):
    """Invertible ``V`` with ``V f_i = g_i`` for all ``i``, or ``None``.

    ``V`` is the least-squares solution of ``V T_F = T_G``.
    """
    if F.n != G.n or F.space.dim != G.space.dim:
        raise ShapeError("families must share the index set and the ambient dimension")
    TF, TG = F.vectors, G.vectors
    V = np.linalg.lstsq(TF.T, TG.T, rcond=None)[0].T
    scale = np.linalg.norm(TG, 2)
    resid = np.linalg.norm(V @ TF - TG, 2)
    if resid > tol * max(scale, np.finfo(float).tiny):
        return None
    if rank(V, rtol) < F.space.dim:
        return None
    return V
