"""J-frames: classification, the J-frame operator and the canonical dual.

For a family with synthesis matrix ``T`` and signs ``sigma``, the J-adjoint
of ``T`` (coefficient space carrying ``J2 = diag(sigma)``) is
``T+ = J2 T* J`` and the J-frame operator is ``S = T T+``, i.e.
``S f = sum_i sigma_i [f, f_i] f_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
import scipy.linalg

from . import kernels
from ._util import complex_normal, make_rng, opnorm
from .errors import NotAJFrameError, PreconditionError, ShapeError
from .frames import FrameFamily
from .krein import (
    DEFAULT_RTOL,
    Definiteness,
    Subspace,
    as_matrix,
    as_vector,
    classify_subspace,
    j_adjoint,
    j_companion,
    j_positive_margin,
    rank,
    uniform_constant,
)
from .report import Report

__all__ = [
    "JFrameAnalysis",
    "JFrameBounds",
    "analyze_jframe",
    "canonical_dual",
    "canonical_witness",
    "check_canonical_dual",
    "check_coefficient_projection",
    "check_operator_identities",
    "check_reconstruction",
    "coefficient_projection_E",
    "jframe_operator",
    "jframe_operator_apply",
    "jframe_operator_characterization",
    "nullspace_splitting",
    "require_jframe",
    "splus_extremality_check",
    "synthesis_adjoint",
]


class JFrameBounds(NamedTuple):
    """Optimal constants of ``a (+-[f,f]) <= sum_{I+-} |[f,f_i]|^2 <= b (+-[f,f])`` on ``M+-``.

    Entries are ``None`` for an empty block.
    """

    alpha_plus: Optional[float]
    beta_plus: Optional[float]
    alpha_minus: Optional[float]
    beta_minus: Optional[float]


@dataclass(frozen=True, eq=False)
class JFrameAnalysis:
    is_jframe: bool
    M_plus: Subspace
    M_minus: Subspace
    class_plus: Definiteness
    class_minus: Definiteness
    S: np.ndarray
    S_plus: np.ndarray
    S_minus: np.ndarray
    Q: Optional[np.ndarray] = None
    bounds: Optional[JFrameBounds] = None
    neutral_angles: tuple = (None, None)
    diagnostics: list = field(default_factory=list)


def synthesis_adjoint(F):
    """``T+ = J2 T* J``: maps ``f`` to ``sum_i sigma_i [f, f_i] e_i``."""
    return j_adjoint(F.vectors, F.coefficient_space(), F.space)


def jframe_operator(F):
    """``S = T J2 T* J`` as a dense matrix."""
    T = F.vectors
    return (T * F.signs[None, :]) @ (T.conj().T * F.space.sig[None, :])


def _signed_parts(F):
    T = F.vectors
    sigJ = F.space.sig[None, :]
    Tp = T[:, F.plus]
    Tm = T[:, F.minus]
    S_plus = Tp @ (Tp.conj().T * sigJ)
    S_minus = Tm @ (Tm.conj().T * sigJ)
    return Tp, Tm, S_plus, S_minus


def _block_bounds(M, Tblock, sign):
    if M.dim == 0 or Tblock.shape[1] == 0:
        return None, None
    sigJ = M.ambient.sig[:, None]
    K = M.basis.conj().T @ (sigJ * Tblock)
    A = K @ K.conj().T
    G = sign * M.gram()
    ev = scipy.linalg.eigh(A, G, eigvals_only=True)
    return float(ev[0]), float(ev[-1])


def _oblique_projection(B_range, B_null):
    """Projection onto span(B_range) along span(B_null); bases must fill the space."""
    k = B_range.shape[1]
    M = np.hstack([B_range, B_null])
    coords = np.linalg.solve(M, np.eye(M.shape[0], dtype=np.complex128))
    return B_range @ coords[:k]


def analyze_jframe(F, tol=DEFAULT_RTOL, rtol=DEFAULT_RTOL):
    """Classify ``F`` and compute ``M+-``, ``Q``, ``S``, ``S+-`` and the J-frame bounds."""
    sp = F.space
    diags = []
    neutral = F.neutral_indices()
    if neutral.size:
        diags.append(f"neutral vectors at indices {neutral.tolist()}")

    Tp, Tm, S_plus, S_minus = _signed_parts(F)
    M_plus = Subspace.span(sp, Tp, rtol)
    M_minus = Subspace.span(sp, Tm, rtol)
    class_plus = classify_subspace(M_plus, tol)
    class_minus = classify_subspace(M_minus, tol)

    plus_ok = M_plus.dim == sp.p and (sp.p == 0 or class_plus is Definiteness.UNIFORMLY_POSITIVE)
    minus_ok = M_minus.dim == sp.q and (sp.q == 0 or class_minus is Definiteness.UNIFORMLY_NEGATIVE)
    if not plus_ok:
        diags.append(
            f"span of positive vectors is {class_plus.value} of dim {M_plus.dim}; "
            f"maximal uniformly J-positive needs dim {sp.p}"
        )
    if not minus_ok:
        diags.append(
            f"span of negative vectors is {class_minus.value} of dim {M_minus.dim}; "
            f"maximal uniformly J-negative needs dim {sp.q}"
        )

    lo_p, _ = uniform_constant(M_plus)
    _, hi_m = uniform_constant(M_minus)
    # angle between M+- and the neutral cone is arcsin(uniform constant) / 2
    neutral_angles = (
        0.5 * float(np.arcsin(np.clip(lo_p, -1, 1))) if M_plus.dim else None,
        0.5 * float(np.arcsin(np.clip(-hi_m, -1, 1))) if M_minus.dim else None,
    )

    S = S_plus - S_minus
    is_jframe = plus_ok and minus_ok and neutral.size == 0
    Q = bounds = None
    if is_jframe:
        Q = _oblique_projection(M_plus.basis, M_minus.basis)
        bounds = JFrameBounds(*_block_bounds(M_plus, Tp, 1.0), *_block_bounds(M_minus, Tm, -1.0))
    return JFrameAnalysis(
        is_jframe=is_jframe,
        M_plus=M_plus,
        M_minus=M_minus,
        class_plus=class_plus,
        class_minus=class_minus,
        S=S,
        S_plus=S_plus,
        S_minus=S_minus,
        Q=Q,
        bounds=bounds,
        neutral_angles=neutral_angles,
        diagnostics=diags,
    )


def require_jframe(F, tol=DEFAULT_RTOL):
    an = analyze_jframe(F, tol)
    if not an.is_jframe:
        raise NotAJFrameError("family is not a J-frame: " + "; ".join(an.diagnostics), an.diagnostics)
    return an


def jframe_operator_apply(F, f, check=True):
    """``S f`` by direct summation over the family.

    With ``check`` the result is compared against the matrix product ``S @ f``.
    """
    f = as_vector(f, F.space.dim)
    out = kernels.signed_cross_sum(F.vectors, F.vectors, F.signs, F.space.sig, f)
    if check:
        ref = jframe_operator(F) @ f
        scale = max(1.0, float(np.linalg.norm(ref)))
        if np.linalg.norm(out - ref) > 1e-12 * scale * max(1, F.n):
            raise ArithmeticError("direct summation disagrees with the matrix J-frame operator")
    return out


def canonical_dual(F, tol=DEFAULT_RTOL):
    """``{S^-1 f_i}``. Raises :class:`NotAJFrameError` unless ``F`` is a J-frame."""
    an = require_jframe(F, tol)
    G = F.with_vectors(np.linalg.solve(an.S, F.vectors))
    if np.any(G.signs != F.signs):
        bad = np.flatnonzero(G.signs != F.signs).tolist()
        raise ArithmeticError(f"canonical dual flipped signs at indices {bad}")
    return G


def check_canonical_dual(F, tol=1e-8):
    """Verify the canonical dual is a J-frame with operator ``S^-1``, same signs,
    and positive/negative spans equal to ``M-^[perp]`` / ``M+^[perp]``."""
    an = require_jframe(F)
    G = canonical_dual(F)
    gan = analyze_jframe(G)
    Sinv = np.linalg.inv(an.S)
    op_resid = opnorm(jframe_operator(G) - Sinv) / max(1.0, opnorm(Sinv))
    signs_ok = bool(np.all(G.signs == F.signs))
    ang_plus = gan.M_plus.distance(j_companion(an.M_minus))
    ang_minus = gan.M_minus.distance(j_companion(an.M_plus))
    passed = gan.is_jframe and signs_ok and op_resid < tol and max(ang_plus, ang_minus) < tol
    return Report(
        "canonical_dual",
        passed,
        {
            "is_jframe": gan.is_jframe,
            "signs_preserved": signs_ok,
            "operator_residual": op_resid,
            "span_angle_plus": ang_plus,
            "span_angle_minus": ang_minus,
        },
        gan.diagnostics,
    )


def check_reconstruction(F, G, trials=20, tol=1e-8, rng=None):
    """Evaluate ``sum sigma_i [f, f_i] g_i`` and ``sum sigma_i [f, g_i] f_i`` on random ``f``.

    Signs ``sigma_i`` are taken from ``F``. Passes when both reproduce ``f``
    with relative residual at most ``tol``.
    """
    if F.n != G.n or F.space != G.space:
        raise ShapeError("families must share the index set and the space")
    rng = make_rng(rng)
    sig = F.space.sig
    worst = 0.0
    for _ in range(trials):
        f = complex_normal(rng, F.space.dim)
        nf = np.linalg.norm(f)
        r1 = kernels.signed_cross_sum(F.vectors, G.vectors, F.signs, sig, f)
        r2 = kernels.signed_cross_sum(G.vectors, F.vectors, F.signs, sig, f)
        worst = max(worst, np.linalg.norm(r1 - f) / nf, np.linalg.norm(r2 - f) / nf)
    return Report("reconstruction", bool(worst <= tol), {"max_relative_residual": float(worst), "trials": trials})


def _intersection_dim(a, b, rtol=DEFAULT_RTOL):
    if a.dim == 0 or b.dim == 0:
        return 0
    return a.dim + b.dim - rank(np.hstack([a.basis, b.basis]), rtol)


def _coordinate_block(space, idx):
    B = np.zeros((space.dim, len(idx)), dtype=np.complex128)
    B[idx, np.arange(len(idx))] = 1.0
    return Subspace(space, B)


def nullspace_splitting(F, tol=1e-10, rtol=DEFAULT_RTOL):
    """Check that ``N(T)`` and ``N(T)^[perp]`` split along ``l2(I+) + l2(I-)``."""
    require_jframe(F)
    coef = F.coefficient_space()
    T = F.vectors
    N = Subspace(coef, scipy.linalg.null_space(T, rcond=rtol))
    C = j_companion(N)
    Lp = _coordinate_block(coef, F.plus)
    Lm = _coordinate_block(coef, F.minus)
    Pp = np.diag((F.signs > 0).astype(np.complex128))

    def comm(P):
        return opnorm(Pp @ P - P @ Pp)

    n_plus = _intersection_dim(N, Lp, rtol)
    n_minus = _intersection_dim(N, Lm, rtol)
    c_plus = _intersection_dim(C, Lp, rtol)
    c_minus = _intersection_dim(C, Lm, rtol)
    comm_N = comm(N.projector())
    comm_C = comm(C.projector())
    split_N = n_plus + n_minus == N.dim
    split_C = c_plus + c_minus == C.dim
    return Report(
        "nullspace_splitting",
        bool(split_N and split_C and comm_N <= tol and comm_C <= tol),
        {
            "excess": N.dim,
            "kernel_dim_plus": n_plus,
            "kernel_dim_minus": n_minus,
            "companion_dim": C.dim,
            "companion_dim_plus": c_plus,
            "companion_dim_minus": c_minus,
            "commutation_residual_kernel": comm_N,
            "commutation_residual_companion": comm_C,
        },
    )


def coefficient_projection_E(F):
    """``E = T+ S^-1 T``, the J2-selfadjoint projection onto ``N(T)^[perp]``."""
    an = require_jframe(F)
    Tplus = synthesis_adjoint(F)
    return Tplus @ np.linalg.solve(an.S, F.vectors)


def check_coefficient_projection(F, tol=1e-10, rtol=DEFAULT_RTOL):
    E = coefficient_projection_E(F)
    coef = F.coefficient_space()
    Pp = np.diag((F.signs > 0).astype(np.complex128))
    Pm = np.eye(F.n) - Pp
    N = Subspace(coef, scipy.linalg.null_space(F.vectors, rcond=rtol))
    range_angle = Subspace.span(coef, E, rtol).distance(j_companion(N))
    vals = {
        "idempotent_residual": opnorm(E @ E - E),
        "selfadjoint_residual": opnorm(j_adjoint(E, coef) - E),
        "commutation_residual_plus": opnorm(E @ Pp - Pp @ E),
        "commutation_residual_minus": opnorm(E @ Pm - Pm @ E),
        "range_angle": range_angle,
        "rank": rank(E, rtol),
    }
    passed = all(v <= tol for k, v in vals.items() if k.endswith("residual") or "residual_" in k)
    passed = passed and range_angle <= 1e-8
    return Report("coefficient_projection", bool(passed), vals)


def check_operator_identities(F, trials=20, tol=1e-10, rng=None):
    """Numerical checks of the structural identities of a J-frame operator.

    ``QT = TP+``, ``QS = SQ+``, ``S+ = QS``, ``S- = -(I-Q)S``, ``S`` maps
    ``M-^[perp]`` onto ``M+`` and ``M+^[perp]`` onto ``M-``, the sign of
    ``[Sf, f]`` on those companions, and the J-frame bounds on random vectors.
    """
    an = require_jframe(F)
    rng = make_rng(rng)
    sp = F.space
    T, S, Q = F.vectors, an.S, an.Q
    Pp = np.diag((F.signs > 0).astype(np.complex128))
    I = np.eye(sp.dim)
    scale = max(1.0, opnorm(S) * max(1.0, opnorm(Q)))
    vals = {
        "intertwining": opnorm(Q @ T - T @ Pp) / max(1.0, opnorm(Q) * opnorm(T)),
        "QS_SQplus": opnorm(Q @ S - S @ j_adjoint(Q, sp)) / scale,
        "S_plus_QS": opnorm(an.S_plus - Q @ S) / scale,
        "S_minus": opnorm(an.S_minus + (I - Q) @ S) / scale,
    }
    Mm_perp = j_companion(an.M_minus)
    Mp_perp = j_companion(an.M_plus)
    vals["mapping_angle_plus"] = Mm_perp.apply(S).distance(an.M_plus)
    vals["mapping_angle_minus"] = Mp_perp.apply(S).distance(an.M_minus)

    min_pos = np.inf
    max_neg = -np.inf
    bound_violation = 0.0
    b = an.bounds
    for _ in range(trials):
        if Mm_perp.dim:
            u = Mm_perp.basis @ complex_normal(rng, Mm_perp.dim)
            u /= np.linalg.norm(u)
            min_pos = min(min_pos, sp.product(S @ u, u).real)
        if Mp_perp.dim:
            v = Mp_perp.basis @ complex_normal(rng, Mp_perp.dim)
            v /= np.linalg.norm(v)
            max_neg = max(max_neg, sp.product(S @ v, v).real)
        for M, idx, sign, lo, hi in (
            (an.M_plus, F.plus, 1.0, b.alpha_plus, b.beta_plus),
            (an.M_minus, F.minus, -1.0, b.alpha_minus, b.beta_minus),
        ):
            if M.dim == 0:
                continue
            f = M.basis @ complex_normal(rng, M.dim)
            energy = sum(abs(sp.product(f, F.vectors[:, i])) ** 2 for i in idx)
            ff = sign * sp.product(f, f).real
            slack = 1e-10 * max(1.0, energy)
            bound_violation = max(bound_violation, lo * ff - energy - slack, energy - hi * ff - slack)
    vals["min_form_on_M_minus_perp"] = float(min_pos) if np.isfinite(min_pos) else None
    vals["max_form_on_M_plus_perp"] = float(max_neg) if np.isfinite(max_neg) else None
    vals["bound_violation"] = float(max(bound_violation, 0.0))

    passed = (
        vals["intertwining"] <= tol
        and vals["QS_SQplus"] <= tol
        and vals["S_plus_QS"] <= tol
        and vals["S_minus"] <= tol
        and vals["mapping_angle_plus"] <= 1e-8
        and vals["mapping_angle_minus"] <= 1e-8
        and (not Mm_perp.dim or min_pos > 0)
        and (not Mp_perp.dim or max_neg < 0)
        and vals["bound_violation"] == 0.0
    )
    return Report("operator_identities", bool(passed), vals)


def splus_extremality_check(F, trials=20, rng=None, tol=1e-9):
    """Check that ``S+`` is the ``<=_J``-least J-selfadjoint ``X >= S`` with range in ``M+``
    (and ``-S-`` the greatest ``Y <= S`` with range in ``M-``) against random competitors.

    Competitors are ``X = S+ + Q R Q+`` and ``Y = -S- - (I-Q) R (I-Q)+`` with
    ``R = A A+`` for ``A`` mapping a positive-definite coefficient space into
    the ambient space, which makes ``R`` J-positive.
    """
    an = require_jframe(F)
    rng = make_rng(rng)
    sp = F.space
    S, Sp, Sm, Q = an.S, an.S_plus, an.S_minus, an.Q
    I = np.eye(sp.dim)
    IQ = I - Q
    vals = {
        "margin_S_le_Splus": j_positive_margin(Sp - S, sp) if opnorm(Sp - S) else 0.0,
        "margin_minusSminus_le_S": j_positive_margin(S + Sm, sp) if opnorm(S + Sm) else 0.0,
    }
    worst_member = np.inf
    worst_min = np.inf
    worst_identity = 0.0
    for _ in range(trials):
        A = complex_normal(rng, (sp.dim, sp.dim))
        R = A @ (A.conj().T * sp.sig[None, :])  # A A+ with A's domain positive definite
        X = Sp + Q @ R @ j_adjoint(Q, sp)
        Y = -Sm - IQ @ R @ j_adjoint(IQ, sp)
        sc = max(1.0, opnorm(X), opnorm(Y))
        sa = max(opnorm(X - j_adjoint(X, sp)), opnorm(Y - j_adjoint(Y, sp))) / sc
        range_leak = max(
            opnorm(X - an.M_plus.projector() @ X),
            opnorm(Y - an.M_minus.projector() @ Y),
        ) / sc
        member = min(j_positive_margin(X - S, sp), j_positive_margin(S - Y, sp))
        if sa > tol or range_leak > 1e-8:
            member = -np.inf
        worst_member = min(worst_member, member)
        worst_min = min(worst_min, j_positive_margin(X - Sp, sp), j_positive_margin(-Sm - Y, sp))
        # the step of the argument: X - S+ = Q (X - S) Q+
        worst_identity = max(
            worst_identity,
            opnorm((X - Sp) - Q @ (X - S) @ j_adjoint(Q, sp)) / sc,
            opnorm((-Sm - Y) - IQ @ (S - Y) @ j_adjoint(IQ, sp)) / sc,
        )
    vals["competitor_membership_margin"] = float(worst_member) if trials else None
    vals["competitor_order_margin"] = float(worst_min) if trials else None
    vals["compression_identity_residual"] = float(worst_identity)
    passed = (
        vals["margin_S_le_Splus"] >= -tol
        and vals["margin_minusSminus_le_S"] >= -tol
        and (not trials or (worst_member >= -tol and worst_min >= -tol))
        and worst_identity <= 1e-8
    )
    return Report("splus_extremality", bool(passed), vals)


def canonical_witness(F_or_analysis):
    """``M-^[perp]``: a subspace satisfying the J-frame operator conditions for ``S``."""
    an = F_or_analysis if isinstance(F_or_analysis, JFrameAnalysis) else require_jframe(F_or_analysis)
    return j_companion(an.M_minus)


def jframe_operator_characterization(S, L_plus, tol=DEFAULT_RTOL):
    """Test the three conditions for an invertible J-selfadjoint ``S`` with witness ``L_plus``.

    (i) ``S(L+)`` is maximal uniformly J-positive, (ii) ``[Sf, f] >= 0`` on
    ``L+``, (iii) ``[Sg, g] <= 0`` on ``S(L+)^[perp]``.
    """
    sp = L_plus.ambient
    S = as_matrix(S, (sp.dim, sp.dim))
    nS = opnorm(S)
    if opnorm(S - j_adjoint(S, sp)) > tol * max(1.0, nS):
        raise PreconditionError("operator is not J-selfadjoint")
    if rank(S) < sp.dim:
        raise PreconditionError("operator is not invertible")
    sig = sp.sig[:, None]

    L_cls = classify_subspace(L_plus, tol)
    L_ok = L_cls is Definiteness.UNIFORMLY_POSITIVE and L_plus.dim == sp.p or (sp.p == 0 and L_plus.dim == 0)
    SL = L_plus.apply(S)
    SL_cls = classify_subspace(SL, tol)
    cond_i = (SL_cls is Definiteness.UNIFORMLY_POSITIVE and SL.dim == sp.p) or (sp.p == 0 and SL.dim == 0)

    def form_extremes(sub):
        if sub.dim == 0:
            return 0.0, 0.0
        H = sub.basis.conj().T @ (sig * (S @ sub.basis))
        ev = np.linalg.eigvalsh(0.5 * (H + H.conj().T))
        return float(ev[0]), float(ev[-1])

    lo_L, _ = form_extremes(L_plus)
    comp = j_companion(SL)
    _, hi_C = form_extremes(comp)
    cond_ii = lo_L >= -tol * nS
    cond_iii = hi_C <= tol * nS
    return Report(
        "jframe_operator_characterization",
        bool(L_ok and cond_i and cond_ii and cond_iii),
        {
            "witness_maximal_positive": bool(L_ok),
            "condition_i": bool(cond_i),
            "condition_ii": bool(cond_ii),
            "condition_iii": bool(cond_iii),
            "min_form_on_L_plus": lo_L,
            "max_form_on_companion": hi_C,
        },
    )
