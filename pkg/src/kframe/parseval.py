"""Tight and Parseval J-frames, the principal square root, Naimark dilations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.stats

from . import kernels
from ._util import opnorm
from .errors import CrossOrthogonalityError, PreconditionError, RegularityError, SectorError
from .frames import FrameFamily, similarity_witness
from .jframe import analyze_jframe, require_jframe, synthesis_adjoint
from .krein import (
    DEFAULT_RTOL,
    Definiteness,
    KreinSpace,
    Subspace,
    as_matrix,
    classify_subspace,
    is_maximal_definite,
    j_adjoint,
    j_companion,
    j_projection,
    max_cross_product,
    rank,
)
from .report import Report

__all__ = [
    "Dilation",
    "NotConstructed",
    "ParsevalDualDilation",
    "align_to_decomposition",
    "aligning_unitary",
    "canonical_parseval",
    "check_canonical_parseval",
    "check_dilation",
    "check_parseval_decomposition",
    "inverse_sqrt",
    "is_parseval",
    "is_tight",
    "j_orthonormalize",
    "naimark_coefficient_check",
    "naimark_dilate",
    "parseval_check",
    "parseval_decomposition",
    "parseval_dual_dilation",
    "principal_sqrt",
    "tight_characterization",
]


def principal_sqrt(S, tol=1e-10):
    """Principal square root of a matrix with spectrum in the open right half-plane.

    Complex Schur form ``S = Z U Z*`` followed by the upper-triangular
    recurrence ``R_ij = (U_ij - sum_k R_ik R_kj) / (R_ii + R_jj)``. The
    eigenvalues of the result lie in the sector ``|arg z| < pi/4``.
    """
    S = as_matrix(S)
    if S.shape[0] != S.shape[1]:
        raise ValueError("square matrix required")
    ev = np.linalg.eigvals(S)
    if ev.size and np.min(ev.real) <= tol * max(opnorm(S), np.finfo(float).tiny):
        raise SectorError(f"eigenvalue with real part {np.min(ev.real):.3e} is not in the open right half-plane")
    U, Z = scipy.linalg.schur(S, output="complex")
    R = kernels.sqrtm_upper(U)
    return Z @ R @ Z.conj().T


def inverse_sqrt(S, tol=1e-10):
    P = principal_sqrt(S, tol)
    return np.linalg.solve(P, np.eye(P.shape[0], dtype=np.complex128))


def is_tight(F, tol=1e-9):
    """``(S == alpha I, alpha)`` with ``alpha = trace(S) / dim``."""
    an = require_jframe(F)
    alpha = float(np.trace(an.S).real) / F.space.dim
    tight = alpha > 0 and opnorm(an.S - alpha * np.eye(F.space.dim)) <= tol * alpha
    return bool(tight), alpha


def tight_characterization(F, tol=1e-9):
    """Tightness through the blocks: ``F+-`` tight in ``(M+-, +-[.,.])`` with a
    shared bound and ``M- = M+^[perp]``. Recorded against :func:`is_tight`."""
    an = require_jframe(F)
    b = an.bounds

    def tight_block(lo, hi):
        return lo is None or abs(hi - lo) <= tol * hi

    a = tight_block(b.alpha_plus, b.beta_plus) and tight_block(b.alpha_minus, b.beta_minus)
    if b.alpha_plus is None or b.alpha_minus is None:
        shared = True
    else:
        shared = abs(b.alpha_plus - b.alpha_minus) <= tol * max(b.alpha_plus, b.alpha_minus)
    angle = an.M_minus.distance(j_companion(an.M_plus))
    c = angle <= 1e-8
    verdict = bool(a and shared and c)
    tight, alpha = is_tight(F, tol)
    return Report(
        "tight_characterization",
        verdict,
        {
            "blocks_tight": bool(a),
            "shared_bound": bool(shared),
            "companion_match": bool(c),
            "companion_angle": angle,
            "bounds": list(b),
            "is_tight": tight,
            "alpha": alpha,
            "agrees": verdict == tight,
        },
    )


def _parseval_parts(F, tol, rtol=DEFAULT_RTOL):
    an = analyze_jframe(F)
    if not an.is_jframe:
        return an, None
    sp, coef = F.space, F.coefficient_space()
    T = F.vectors
    Tplus = synthesis_adjoint(F)
    I = np.eye(sp.dim)
    op = opnorm(an.S - I)
    iso = opnorm(Tplus.conj().T @ (coef.sig[:, None] * Tplus) - sp.J)
    Pi = Tplus @ T
    N = Subspace(coef, scipy.linalg.null_space(T, rcond=rtol))
    proj = max(opnorm(Pi @ Pi - Pi), opnorm(j_adjoint(Pi, coef) - Pi))
    proj_angle = Subspace.span(coef, Pi, rtol).distance(j_companion(N))
    return an, {
        "operator_residual": op,
        "isometry_residual": iso,
        "projection_residual": proj,
        "projection_range_angle": proj_angle,
        "operator_test": op <= tol,
        "coisometry_test": iso <= tol,
        "projection_test": proj <= tol and proj_angle <= 1e-8,
    }


def is_parseval(F, tol=1e-9):
    """J-frame with ``S = I`` (``||S - I|| <= tol``). False for non-J-frames."""
    an = analyze_jframe(F)
    return bool(an.is_jframe and opnorm(an.S - np.eye(F.space.dim)) <= tol)


def parseval_check(F, tol=1e-9):
    """Three equivalent Parseval tests: ``S = I``; ``T+`` a J-isometry;
    ``T+ T`` the J-selfadjoint projection onto ``N(T)^[perp]``."""
    an, vals = _parseval_parts(F, tol)
    if vals is None:
        return Report("parseval", False, {"is_jframe": False, "agree": True}, an.diagnostics)
    verdicts = (vals["operator_test"], vals["coisometry_test"], vals["projection_test"])
    vals["is_jframe"] = True
    vals["agree"] = len(set(verdicts)) == 1
    return Report("parseval", bool(vals["operator_test"]), vals)


def parseval_decomposition(F):
    """``L+- = S^{1/2}(M-+^[perp])``, a fundamental decomposition."""
    an = require_jframe(F)
    P = principal_sqrt(an.S)
    L_plus = j_companion(an.M_minus).apply(P)
    L_minus = j_companion(an.M_plus).apply(P)
    return L_plus, L_minus


def check_parseval_decomposition(F, tol=1e-9):
    L_plus, L_minus = parseval_decomposition(F)
    sp = F.space
    cp, cm = classify_subspace(L_plus), classify_subspace(L_minus)
    max_plus = L_plus.dim == sp.p and (sp.p == 0 or cp is Definiteness.UNIFORMLY_POSITIVE)
    max_minus = L_minus.dim == sp.q and (sp.q == 0 or cm is Definiteness.UNIFORMLY_NEGATIVE)
    cross = max_cross_product(L_plus, L_minus)
    an = require_jframe(F)
    P = principal_sqrt(an.S)
    sa = opnorm(P - j_adjoint(P, sp)) / max(1.0, opnorm(P))
    vals = {
        "dims": [L_plus.dim, L_minus.dim],
        "maximal_positive": bool(max_plus),
        "maximal_negative": bool(max_minus),
        "max_cross_product": cross,
        "sqrt_selfadjoint_residual": sa,
    }
    diags = []
    if sa > tol:
        diags.append(f"square root deviates from J-selfadjointness by {sa:.3e}")
    return Report("parseval_decomposition", bool(max_plus and max_minus and cross < tol), vals, diags)


def canonical_parseval(F):
    """``{S^{-1/2} f_i}``."""
    an = require_jframe(F)
    return F.with_vectors(inverse_sqrt(an.S) @ F.vectors)


def check_canonical_parseval(F, tol=1e-9):
    an = require_jframe(F)
    Sm12 = inverse_sqrt(an.S)
    P = canonical_parseval(F)
    pan = analyze_jframe(P)
    op = opnorm(pan.S - np.eye(F.space.dim))
    signs = bool(np.all(P.signs == F.signs))
    V = similarity_witness(F, P)
    wit = None if V is None else opnorm(V - Sm12) / opnorm(Sm12)
    passed = pan.is_jframe and op < tol and signs and wit is not None and wit < 1e-8
    return Report(
        "canonical_parseval",
        bool(passed),
        {"operator_residual": op, "signs_preserved": signs, "witness_residual": wit, "is_jframe": pan.is_jframe},
    )


def j_orthonormalize(B, space, sign):
    """Basis of span(B) with ``[x_i, x_j] = sign * delta_ij`` (span must be ``sign``-definite).

    Uses the symmetric inverse square root of the Gram matrix, so an
    already J-orthonormal basis is returned unchanged.
    """
    G = sign * (B.conj().T @ (space.sig[:, None] * B))
    w, U = np.linalg.eigh(0.5 * (G + G.conj().T))
    if w.size and w[0] <= 0:
        raise PreconditionError("span is not definite of the requested sign")
    return B @ (U * (1.0 / np.sqrt(w))[None, :]) @ U.conj().T


def aligning_unitary(L_plus, L_minus, H_plus):
    """J-unitary ``U`` with ``U(L+) = H+`` and ``U(L-) = H+^[perp]``.

    ``L+- `` must be a fundamental decomposition. The target bases are the
    J-orthonormalized images of the source bases under the J-selfadjoint
    projection onto ``H+``, so ``U = I`` when ``H+ = L+``.
    """
    sp = H_plus.ambient
    if classify_subspace(H_plus) is not Definiteness.UNIFORMLY_POSITIVE and sp.p:
        raise PreconditionError("target subspace is not uniformly J-positive")
    if not (sp.p == 0 or is_maximal_definite(H_plus)):
        raise PreconditionError("target subspace is not maximal uniformly J-positive")
    E = j_projection(H_plus)
    I = np.eye(sp.dim)
    Xp = j_orthonormalize(L_plus.basis, sp, 1.0)
    Xm = j_orthonormalize(L_minus.basis, sp, -1.0)
    Yp = j_orthonormalize(E @ Xp, sp, 1.0)
    Ym = j_orthonormalize((I - E) @ Xm, sp, -1.0)
    X = np.hstack([Xp, Xm])
    Y = np.hstack([Yp, Ym])
    return np.linalg.solve(X.T, Y.T).T


def align_to_decomposition(F, H_plus):
    """Parseval J-frame similar to ``F`` whose positive vectors span ``H_plus``."""
    L_plus, L_minus = parseval_decomposition(F)
    U = aligning_unitary(L_plus, L_minus, H_plus)
    return canonical_parseval(F).mapped(U)


@dataclass(frozen=True, eq=False)
class Dilation:
    """A Parseval J-frame realized as ``f_i = E b_i`` in a larger Krein space.

    ``H`` is identified with ``embed(H)`` inside ``big_space``; ``basis``
    columns are J'-orthonormal and ``projection`` is the J'-selfadjoint
    projection onto ``embed(H)``.
    """

    big_space: KreinSpace
    basis: np.ndarray
    embed: np.ndarray
    projection: np.ndarray

    def pullback(self, Y):
        """Preimages under ``embed`` (least squares) of the columns of ``Y``."""
        return np.linalg.lstsq(self.embed, Y, rcond=None)[0]

    def recovered(self):
        """``pullback(E b_i)`` for every basis vector, as columns."""
        return self.pullback(self.projection @ self.basis)


def naimark_dilate(F, tol=1e-9):
    """Dilation with ``K = l2(I)``, ``b_i = e_i``, ``embed = T+`` and ``E = T+ T``."""
    if not is_parseval(F, tol):
        raise PreconditionError("Naimark dilation needs a Parseval J-frame")
    coef = F.coefficient_space()
    Tplus = synthesis_adjoint(F)
    return Dilation(coef, np.eye(F.n, dtype=np.complex128), Tplus, Tplus @ F.vectors)


def check_dilation(D, F, tol=1e-10):
    K = D.big_space
    sig = K.sig
    E, B, emb = D.projection, D.basis, D.embed
    vals = {
        "basis_residual": opnorm(B.conj().T @ (sig[:, None] * B) - np.diag(F.signs)),
        "idempotent_residual": opnorm(E @ E - E),
        "selfadjoint_residual": opnorm(j_adjoint(E, K) - E),
        "fixes_embedding_residual": opnorm(E @ emb - emb),
        "isometry_residual": opnorm(emb.conj().T @ (sig[:, None] * emb) - F.space.J),
        "recovery_residual": float(np.max(np.linalg.norm(D.recovered() - F.vectors, axis=0))) if F.n else 0.0,
    }
    emb_f = emb @ F.vectors
    leak = 0.0
    for i in range(F.n):
        wrong = sig != F.signs[i]
        leak = max(leak, float(np.linalg.norm(emb_f[wrong, i])))
    vals["block_leak"] = leak
    vals["projection_rank"] = rank(E)
    passed = all(v <= tol for k, v in vals.items() if k != "projection_rank")
    return Report("dilation", bool(passed), vals)


def naimark_coefficient_check(F, tol=1e-9, rtol=DEFAULT_RTOL):
    """Parseval test through the coefficient space: ``N(T)`` splits along
    ``l2(I+-)`` and ``T+ f_i = (I - F_N) e_i`` with ``F_N`` the J-selfadjoint
    projection onto ``N(T)``."""
    vals = {"frame": False, "kernel_split": False, "residual": None}
    diags = []
    neutral = F.neutral_indices()
    if neutral.size:
        diags.append(f"neutral vectors at indices {neutral.tolist()}")
    T = F.vectors
    if F.n == 0 or rank(T, rtol) < F.space.dim:
        diags.append("family does not span the space")
    else:
        vals["frame"] = True
    coef = F.coefficient_space()
    N = Subspace(coef, scipy.linalg.null_space(T, rcond=rtol)) if F.n else Subspace.zero(coef)
    r_plus = rank(T[:, F.plus], rtol) if F.plus.size else 0
    r_minus = rank(T[:, F.minus], rtol) if F.minus.size else 0
    split = (F.plus.size - r_plus) + (F.minus.size - r_minus) == N.dim
    vals["kernel_split"] = bool(split)
    passed = False
    if vals["frame"] and split and not neutral.size:
        try:
            FN = j_projection(N)
        except RegularityError as exc:
            diags.append(str(exc))
        else:
            R = synthesis_adjoint(F) @ T - (np.eye(F.n) - FN)
            vals["residual"] = float(np.abs(R).max())
            passed = vals["residual"] <= tol
    vals["agrees_with_is_parseval"] = passed == is_parseval(F, tol)
    return Report("naimark_coefficient", bool(passed), vals, diags)


@dataclass(frozen=True)
class NotConstructed:
    reason: str


@dataclass(frozen=True, eq=False)
class ParsevalDualDilation:
    """``Q b_i = embed(f_i)`` for an oblique projection ``Q`` onto ``embed(H)``,
    together with the Parseval J-frame dual it produces."""

    big_space: KreinSpace
    basis: np.ndarray
    embed: np.ndarray
    projection: np.ndarray
    dual: FrameFamily


def _hilbert_parseval_dual(C, tol):
    """Isometry ``X`` with ``C X = I`` for a frame ``C`` (m x k) of ``C^m``, or a reason.

    ``X = C^dagger + N K`` with ``N`` spanning ``N(C)`` and ``K* K = I - (C C*)^-1``,
    which needs ``C C* >= I`` and ``rank(I - (CC*)^-1) <= dim N(C)``.
    """
    m, k = C.shape
    Sc = C @ C.conj().T
    lam_min = float(np.linalg.eigvalsh(Sc)[0])
    if lam_min < 1.0 - tol:
        return None, f"lower frame bound {lam_min:.6g} < 1"
    D = np.eye(m) - np.linalg.inv(Sc)
    w, U = np.linalg.eigh(0.5 * (D + D.conj().T))
    w = np.clip(w, 0.0, None)
    keep = w > tol
    r = int(np.count_nonzero(keep))
    N = scipy.linalg.null_space(C)
    if r > N.shape[1]:
        return None, f"defect rank {r} exceeds excess {N.shape[1]}"
    k_ex = N.shape[1]
    K = np.zeros((k_ex, m), dtype=np.complex128)
    K[:r] = np.sqrt(w[keep])[:, None] * U[:, keep].conj().T
    X0 = C.conj().T @ np.linalg.solve(Sc, np.eye(m))
    # Any unitary on N(C) gives another solution; pick one without zero rows,
    # since a zero dual vector cannot keep its sign.
    rng = np.random.default_rng(0)
    V = np.eye(k_ex, dtype=np.complex128)
    for _ in range(64):
        X = X0 + N @ V @ K
        rows = np.linalg.norm(X, axis=1)
        if rows.min() > 1e-6 * rows.max():
            return X, None
        V = scipy.stats.unitary_group.rvs(k_ex, random_state=rng) if k_ex > 1 else np.exp(2j * np.pi * rng.random()) * V
    return None, "every candidate dual contains a zero vector"


def parseval_dual_dilation(F, tol=1e-9):
    """Build a Parseval J-frame dual of ``F`` via oblique projections of the
    coefficient basis, one Hilbert-space block per sign.

    Requires ``[f_i, f_j] = 0`` for ``i in I+``, ``j in I-``. Returns
    :class:`NotConstructed` when a block admits no Parseval dual by the
    construction used here.
    """
    an = require_jframe(F)
    sp = F.space
    T = F.vectors
    plus, minus = F.plus, F.minus
    cross = T[:, plus].conj().T @ (sp.sig[:, None] * T[:, minus])
    scale = max(1.0, float(np.max(np.sum(np.abs(T) ** 2, axis=0)))) if F.n else 1.0
    if cross.size and np.abs(cross).max() > tol * scale:
        a, b = np.unravel_index(np.argmax(np.abs(cross)), cross.shape)
        i, j = int(plus[a]), int(minus[b])
        raise CrossOrthogonalityError(
            f"[f_{i}, f_{j}] = {cross[a, b]:.3g} is not zero for i in I+, j in I-", (i, j)
        )
    coef = F.coefficient_space()
    n = F.n
    Q = np.zeros((n, n), dtype=np.complex128)
    embed = np.zeros((n, sp.dim), dtype=np.complex128)
    dual = np.zeros((sp.dim, n), dtype=np.complex128)
    for sign, idx, M in ((1.0, plus, an.M_plus), (-1.0, minus, an.M_minus)):
        if idx.size == 0:
            continue
        Y = j_orthonormalize(M.basis, sp, sign)
        coords = sign * (Y.conj().T @ (sp.sig[:, None] * T[:, idx]))
        X, reason = _hilbert_parseval_dual(coords, tol)
        if X is None:
            return NotConstructed(f"{'positive' if sign > 0 else 'negative'} block: {reason}")
        Q[np.ix_(idx, idx)] = X @ coords
        embed[idx, :] = X @ (sign * (Y.conj().T * sp.sig[None, :]))
        dual[:, idx] = Y @ X.conj().T
    return ParsevalDualDilation(coef, np.eye(n, dtype=np.complex128), embed, Q, F.with_vectors(dual))
