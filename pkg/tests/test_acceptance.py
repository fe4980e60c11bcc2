"""Acceptance suite: one test per criterion, summarized at the end of the run."""

import time

import numpy as np
import pytest

from kframe import (
    FrameFamily,
    KreinSpace,
    Subspace,
    analyze_jframe,
    canonical_dual,
    check_dual,
    dual_is_jframe,
    minimal_norm_check,
    random_dual,
    w_range_criterion,
)
from kframe.jframe import check_canonical_dual, check_coefficient_projection, check_reconstruction, nullspace_splitting
from kframe.parseval import (
    canonical_parseval,
    check_canonical_parseval,
    check_dilation,
    check_parseval_decomposition,
    is_parseval,
    is_tight,
    naimark_coefficient_check,
    naimark_dilate,
    parseval_check,
    principal_sqrt,
    tight_characterization,
)
from kframe.testgen import GenSpec, random_jframe, random_nontight_jframe, random_spec, random_tight_jframe

from conftest import DOUBLED_DUAL_ROWS
from oracles import sqrt_by_quadrature

CRITERIA = {
    1: "doubled basis of C^3: classification, dual G is not a J-frame dual (< 1 s)",
    2: "reconstruction with the canonical dual, 200 frames x 50 vectors (< 30 s)",
    3: "canonical dual suite over 100 frames",
    4: "kernel splitting and coefficient projection over 100 frames with excess >= 1",
    5: "canonical dual minimizes signed coefficient norms, 50 x 20 x 20",
    6: "J-frame dual test agrees with the W-range test on >= 1000 pairs",
    7: "principal square root over 200 operators, quadrature cross-check",
    8: "canonical Parseval frame and its fundamental decomposition over 100 frames",
    9: "Naimark round trip and three-way Parseval equivalence, 100 + 100",
    10: "tightness characterization on 100 tight + 100 non-tight; alpha = 2",
}


@pytest.fixture
def criterion(record_property, request):
    num = int(request.node.name.split("_")[1])
    record_property("criterion", num)
    yield num
    print(f"\n[criterion {num}] {CRITERIA[num]}")


def frames(seed, count, dim_range=(2, 8), excess_range=(0, 5)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_jframe(random_spec(rng, dim_range, excess_range))


def test_01_worked_example(criterion):
    t0 = time.perf_counter()
    sp = KreinSpace((1, 1, -1))
    F = FrameFamily(sp, np.hstack([np.eye(3), np.eye(3)]))
    G = FrameFamily(sp, np.array(DOUBLED_DUAL_ROWS).T)
    an = analyze_jframe(F)
    assert an.is_jframe
    assert an.M_plus.distance(Subspace.span(sp, np.eye(3)[:, :2])) < 1e-10
    assert an.M_minus.distance(Subspace.span(sp, np.eye(3)[:, 2:])) < 1e-10
    assert check_dual(F, G).is_dual
    r = dual_is_jframe(F, G)
    assert not r.is_jframe_dual
    assert r.N_plus.dim == 3 and r.N_plus.distance(Subspace.full(sp)) < 1e-10
    assert time.perf_counter() - t0 < 1.0


def test_02_reconstruction(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for k, F in enumerate(frames(2, 200)):
        r = check_reconstruction(F, canonical_dual(F), trials=50, tol=1e-8, rng=k)
        worst = max(worst, r["max_relative_residual"])
    elapsed = time.perf_counter() - t0
    print(f"\nworst relative residual {worst:.2e}, {elapsed:.1f} s")
    assert worst < 1e-8
    assert elapsed < 30.0


def test_03_canonical_dual(criterion):
    failures = []
    for F in frames(3, 100):
        r = check_canonical_dual(F, tol=1e-8)
        if not r.passed:
            failures.append(r.values)
    assert not failures, failures[:3]


def test_04_splitting_and_projection(criterion):
    worst = {}
    for F in frames(4, 100, excess_range=(1, 5)):
        split = nullspace_splitting(F, tol=1e-10)
        assert split["kernel_dim_plus"] + split["kernel_dim_minus"] == split["excess"] >= 1
        assert split.passed, split.values
        proj = check_coefficient_projection(F, tol=1e-10)
        assert proj.passed, proj.values
        for key in ("commutation_residual_kernel",):
            worst[key] = max(worst.get(key, 0.0), split[key])
        for key in ("idempotent_residual", "selfadjoint_residual", "commutation_residual_plus"):
            worst[key] = max(worst.get(key, 0.0), proj[key])
    print("\n" + ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


def test_05_minimal_norm(criterion):
    rng = np.random.default_rng(5)
    worst = np.inf
    for F in frames(5, 50):
        duals = [random_dual(F, rng, jframe=bool(j % 2)) for j in range(20)]
        r = minimal_norm_check(F, duals, trials=20, rng=rng, tol=1e-10)
        worst = min(worst, r["worst_margin"])
        assert r.passed, r.values
    print(f"\nworst margin {worst:.2e}")


def test_06_theorem_vs_w_range(criterion):
    rng = np.random.default_rng(6)
    pairs = disagreements = 0
    outcomes = set()
    for F in frames(6, 125):
        for j in range(8):
            G = random_dual(F, rng, jframe=bool(j % 2))
            a = dual_is_jframe(F, G).is_jframe_dual
            b = w_range_criterion(F, G).passed
            disagreements += a != b
            outcomes.add(a)
            pairs += 1
    print(f"\n{pairs} pairs, {disagreements} disagreements")
    assert pairs >= 1000 and disagreements == 0
    assert outcomes == {True, False}


def test_07_principal_sqrt(criterion):
    max_arg = 0.0
    compared = 0
    for k, F in enumerate(frames(7, 200)):
        S = analyze_jframe(F).S
        P = principal_sqrt(S)
        nS = np.linalg.norm(S, 2)
        assert np.linalg.norm(P @ P - S, 2) < 1e-9 * nS
        args = np.abs(np.angle(np.linalg.eigvals(P)))
        max_arg = max(max_arg, args.max())
        assert args.max() < np.pi / 4
        if k % 20 == 0:
            Q = sqrt_by_quadrature(S)
            assert np.linalg.norm(P - Q, 2) < 1e-6 * np.linalg.norm(Q, 2)
            compared += 1
    print(f"\nmax |arg| {max_arg:.3f} (limit {np.pi / 4:.3f}), {compared} quadrature comparisons")
    assert compared == 10


def test_08_canonical_parseval(criterion):
    for F in frames(8, 100):
        r = check_canonical_parseval(F, tol=1e-9)
        assert r.passed, r.values
        d = check_parseval_decomposition(F, tol=1e-9)
        assert d.passed, d.values


def _three_way(F):
    p = is_parseval(F)
    c = naimark_coefficient_check(F).passed
    o = parseval_check(F).passed
    return p, c, o


def test_09_naimark(criterion):
    bad = 0
    for F in frames(9, 100):
        P = canonical_parseval(F)
        D = naimark_dilate(P)
        r = check_dilation(D, P, tol=1e-10)
        assert r.passed, r.values
        assert r["projection_rank"] == P.space.dim
        bad += len(set(_three_way(P))) != 1 or not is_parseval(P)
    rng = np.random.default_rng(90)
    for k, F in enumerate(frames(91, 100)):
        # half arbitrary J-frames, half rescaled Parseval frames
        G = F if k % 2 else canonical_parseval(F).scaled(rng.uniform(1.05, 2.0))
        bad += len(set(_three_way(G))) != 1 or is_parseval(G)
    assert bad == 0


def test_10_tight(criterion):
    rng = np.random.default_rng(10)
    disagreements = 0
    for k in range(100):
        spec = random_spec(rng)
        T = random_tight_jframe(spec)
        N = random_nontight_jframe(spec)
        for F, want in ((T, True), (N, False)):
            r = tight_characterization(F)
            disagreements += not (r.passed == is_tight(F)[0] == want)
    assert disagreements == 0
    sp = KreinSpace((1, 1, -1))
    tight, alpha = is_tight(FrameFamily(sp, np.hstack([np.eye(3), np.eye(3)])))
    assert tight and abs(alpha - 2.0) < 1e-12
