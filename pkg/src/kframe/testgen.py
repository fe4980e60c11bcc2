"""Seedable random generators and brute-force oracles for tests and the CLI."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._util import complex_normal, make_rng
from .errors import InfeasibleSpecError
from .frames import FrameFamily
from .jframe import analyze_jframe
from .krein import KreinSpace, Subspace
from .parseval import canonical_parseval, is_tight

__all__ = [
    "GenSpec",
    "oracle_sum",
    "random_contraction",
    "random_jframe",
    "random_maximal_definite",
    "random_nontight_jframe",
    "random_parseval_jframe",
    "random_signature",
    "random_spec",
    "random_tight_jframe",
]


@dataclass(frozen=True)
class GenSpec:
    """Shape of a random J-frame.

    ``excess`` is optional; when given it must equal ``(n_plus - p) + (n_minus - q)``.
    ``cond_cap`` bounds ``max|lambda| / min|lambda|`` over the spectrum of ``S``
    and ``contraction`` bounds the angular-operator norm of ``M+-``.
    """

    dim: int
    p: int
    q: int
    n_plus: int
    n_minus: int
    excess: Optional[int] = None
    cond_cap: float = 1e4
    seed: Optional[int] = None
    contraction: float = 0.9
    max_attempts: int = 200

    @property
    def achieved_excess(self):
        return (self.n_plus - self.p) + (self.n_minus - self.q)

    def problems(self):
        out = []
        if self.dim < 1:
            out.append("dim must be positive")
        if self.p < 0 or self.q < 0 or self.p + self.q != self.dim:
            out.append(f"p + q = {self.p} + {self.q} does not equal dim = {self.dim}")
        if self.n_plus < self.p:
            out.append(f"n_plus = {self.n_plus} < p = {self.p}")
        if self.n_minus < self.q:
            out.append(f"n_minus = {self.n_minus} < q = {self.q}")
        if self.p == 0 and self.n_plus > 0:
            out.append("positive vectors need p > 0")
        if self.q == 0 and self.n_minus > 0:
            out.append("negative vectors need q > 0")
        if self.excess is not None and self.excess != self.achieved_excess:
            out.append(f"excess target {self.excess} differs from implied {self.achieved_excess}")
        if not 0.0 <= self.contraction < 1.0:
            out.append("contraction bound must lie in [0, 1)")
        if self.cond_cap < 1.0:
            out.append("condition cap must be at least 1")
        return out

    def space(self):
        return KreinSpace.from_pq(self.p, self.q)


def random_signature(rng, dim):
    """A random split ``(p, q)`` of ``dim``."""
    p = int(make_rng(rng).integers(0, dim + 1))
    return p, dim - p


def random_spec(rng, dim_range=(2, 8), excess_range=(0, 5), **kwargs):
    """Random :class:`GenSpec` with the requested dimension and excess ranges."""
    rng = make_rng(rng)
    dim = int(rng.integers(dim_range[0], dim_range[1] + 1))
    p, q = random_signature(rng, dim)
    ex = int(rng.integers(excess_range[0], excess_range[1] + 1))
    # extras can only go to a nonempty block
    blocks = [b for b, size in (("+", p), ("-", q)) if size]
    extra_plus = sum(1 for _ in range(ex) if rng.choice(blocks) == "+")
    return GenSpec(dim, p, q, p + extra_plus, q + ex - extra_plus,
                   seed=int(rng.integers(2**63)), **kwargs)


def random_contraction(rng, rows, cols, bound=0.9):
    """Random ``rows x cols`` matrix with spectral norm uniform in ``(0, bound]``."""
    K = complex_normal(rng, (rows, cols))
    if K.size == 0 or bound == 0.0:
        return np.zeros((rows, cols), dtype=np.complex128)
    return K * (rng.uniform(0.05, 1.0) * bound / np.linalg.norm(K, 2))


def random_maximal_definite(sp, sign, rng=None, K=None, bound=0.9):
    """Graph ``{h + K h}`` of a contraction ``K`` from ``H+-`` into ``H-+``.

    The result is maximal uniformly J-positive (``sign=+1``) or J-negative.
    Pass ``K`` explicitly for a deterministic subspace.
    """
    rng = make_rng(rng)
    sig = sp.sig
    src = np.flatnonzero(sig == sign)
    dst = np.flatnonzero(sig != sign)
    if K is None:
        K = random_contraction(rng, dst.size, src.size, bound)
    K = np.asarray(K, dtype=np.complex128).reshape(dst.size, src.size)
    B = np.zeros((sp.dim, src.size), dtype=np.complex128)
    B[src, np.arange(src.size)] = 1.0
    B[np.ix_(dst, np.arange(src.size))] = K
    return Subspace.span(sp, B)


def _block_vectors(rng, M, count):
    """``count`` spanning vectors of ``M``: a random basis plus random combinations."""
    d = M.dim
    if d == 0:
        return np.zeros((M.ambient.dim, 0), dtype=np.complex128)
    base = M.basis @ complex_normal(rng, (d, d))
    extra = base @ complex_normal(rng, (d, count - d))
    return np.hstack([base, extra])


def _spectral_ratio(S):
    ev = np.abs(np.linalg.eigvals(S))
    return float(ev.max() / ev.min()) if ev.min() > 0 else np.inf


def random_jframe(spec):
    """Random J-frame of the given shape; every output passes ``analyze_jframe``."""
    bad = spec.problems()
    if bad:
        raise InfeasibleSpecError("; ".join(bad))
    rng = make_rng(spec.seed)
    sp = spec.space()
    n = spec.n_plus + spec.n_minus
    for _ in range(spec.max_attempts):
        Mp = random_maximal_definite(sp, 1, rng, bound=spec.contraction)
        Mm = random_maximal_definite(sp, -1, rng, bound=spec.contraction)
        T = np.hstack([_block_vectors(rng, Mp, spec.n_plus), _block_vectors(rng, Mm, spec.n_minus)])
        T = T[:, rng.permutation(n)]
        T /= np.sqrt(np.mean(np.sum(np.abs(T) ** 2, axis=0)))
        F = FrameFamily(sp, T)
        an = analyze_jframe(F)
        if not an.is_jframe or len(F.plus) != spec.n_plus:
            continue
        if _spectral_ratio(an.S) > spec.cond_cap:
            continue
        return F
    raise InfeasibleSpecError(
        f"no J-frame met the condition cap {spec.cond_cap:g} after {spec.max_attempts} attempts"
    )


def random_parseval_jframe(spec):
    return canonical_parseval(random_jframe(spec))


def random_tight_jframe(spec, alpha=None):
    """``sqrt(alpha)`` times a canonical Parseval J-frame, so ``S = alpha I``."""
    if alpha is None:
        alpha = float(make_rng(spec.seed).uniform(0.25, 4.0))
    return random_parseval_jframe(spec).scaled(np.sqrt(alpha))


def random_nontight_jframe(spec):
    """Random J-frame rejected until it is not tight (needs ``dim >= 2``)."""
    if spec.dim < 2:
        raise InfeasibleSpecError("every J-frame of a one-dimensional space is tight")
    rng = make_rng(spec.seed)
    for _ in range(spec.max_attempts):
        F = random_jframe(GenSpec(**{**spec.__dict__, "seed": int(rng.integers(2**63))}))
        if not is_tight(F, 1e-6)[0]:
            return F
    raise InfeasibleSpecError("could not produce a non-tight J-frame")


def oracle_sum(F, f):
    """``sum_i sigma_i [f, f_i] f_i`` by explicit loops over scalars."""
    sig = F.space.signature
    dim = len(sig)
    f = [complex(x) for x in np.asarray(f).ravel()]
    out = [0j] * dim
    for i in range(F.n):
        fi = [complex(x) for x in F.vectors[:, i]]
        ip = 0j
        for k in range(dim):
            ip += sig[k] * f[k] * fi[k].conjugate()
        sigma = 1 if F.self_products[i] >= 0 else -1
        for k in range(dim):
            out[k] += sigma * ip * fi[k]
    return np.array(out, dtype=np.complex128)
