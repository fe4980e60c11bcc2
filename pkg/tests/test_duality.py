import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kframe import (
    FrameFamily,
    InconsistentDualError,
    KreinSpace,
    PreconditionError,
    ShapeError,
    SignViolation,
    Subspace,
    admissible_W,
    canonical_dual,
    check_dual,
    dual_is_jframe,
    extract_W,
    generate_dual,
    j_companion,
    minimal_norm_check,
    random_dual,
    w_range_criterion,
)
from kframe.duality import random_dual_W
from kframe.jframe import analyze_jframe, check_reconstruction, synthesis_adjoint

from conftest import jframes, seeds


class TestDoubledBasisDual:
    def test_G_is_dual_but_not_a_jframe(self, space3, doubled, doubled_dual):
        r = dual_is_jframe(doubled, doubled_dual)
        assert r.is_dual and r.signs_ok
        assert r.is_jframe_dual is False and r.range_verdict is False
        assert r.N_plus.same_span(Subspace.full(space3))
        assert not r.trivial_intersection

    def test_canonical_dual_is_jframe_dual(self, space3, doubled):
        r = dual_is_jframe(doubled, canonical_dual(doubled))
        an = analyze_jframe(doubled)
        assert r.is_jframe_dual and r.range_verdict
        assert r.N_plus.same_span(j_companion(an.M_minus))
        assert r.N_minus.same_span(j_companion(an.M_plus))

    def test_self_is_not_dual(self, doubled):
        assert not check_dual(doubled, doubled).is_dual

    def test_W_of_G(self, doubled, doubled_dual):
        W = extract_W(doubled, doubled_dual)
        assert np.allclose(W, doubled_dual.vectors - doubled.vectors / 2)
        assert np.abs(W).max() > 0.1
        assert np.allclose(W @ synthesis_adjoint(doubled), 0)
        assert np.allclose(generate_dual(doubled, W).vectors, doubled_dual.vectors)

    def test_w_range_fails(self, doubled, doubled_dual):
        r = w_range_criterion(doubled, doubled_dual)
        assert not r.passed and r["leak_plus"] > 0.1

    def test_minimal_norm_at_e1(self, doubled, doubled_dual):
        # oracle: coefficient energies over I+ evaluated by hand-written sums
        f = np.array([1, 0, 0], dtype=complex)
        sp = doubled.space
        canon = sum(abs(sp.product(f, doubled[i] / 2)) ** 2 for i in doubled.plus)
        other = sum(abs(sp.product(f, doubled_dual[i])) ** 2 for i in doubled.plus)
        assert canon == pytest.approx(0.5)
        assert other == pytest.approx(2.5)
        r = minimal_norm_check(doubled, [doubled_dual], trials=50, rng=0)
        assert r.passed and r["worst_margin"] >= 0

    def test_canonical_only_gives_equality(self, doubled):
        r = minimal_norm_check(doubled, [canonical_dual(doubled)], trials=10, rng=0)
        assert r.passed and abs(r["worst_margin"]) < 1e-12


def test_canonical_W_is_zero(doubled):
    assert np.allclose(extract_W(doubled, canonical_dual(doubled)), 0)
    assert w_range_criterion(doubled, canonical_dual(doubled)).passed


def test_zero_W_gives_canonical(doubled):
    G = generate_dual(doubled, np.zeros((3, 6)))
    assert np.allclose(G.vectors, canonical_dual(doubled).vectors)


def test_extract_rejects_inconsistent(doubled):
    bad = doubled.with_vectors(doubled.vectors / 2 + np.outer([1, 0, 0], np.ones(6)))
    with pytest.raises(InconsistentDualError):
        extract_W(doubled, bad)


def test_sign_violation_reported(doubled):
    W = np.zeros((3, 6))
    W[:, 0] = [0, 0, 5]  # pushes g_0 deep into the negative cone
    out = generate_dual(doubled, W)
    assert isinstance(out, SignViolation) and 0 in out.indices


def test_not_dual_precondition(doubled):
    with pytest.raises(PreconditionError):
        dual_is_jframe(doubled, doubled)
    with pytest.raises(PreconditionError):
        minimal_norm_check(doubled, [doubled])


def test_shape_errors(doubled, space3):
    with pytest.raises(ShapeError):
        check_dual(doubled, FrameFamily(space3, np.eye(3)))
    with pytest.raises(ShapeError):
        admissible_W(doubled, np.zeros((3, 5)))


def test_zero_excess_every_dual_is_canonical(rng):
    sp = KreinSpace((1, -1))
    F = FrameFamily(sp, [[2, 0.3], [0.5, 1]])
    G = random_dual(F, rng)
    assert np.allclose(G.vectors, canonical_dual(F).vectors)
    assert dual_is_jframe(F, G).is_jframe_dual


@given(jframes(), seeds, st.booleans())
def test_random_dual_properties(F, seed, jf):
    rng = np.random.default_rng(seed)
    G = random_dual(F, rng, jframe=jf)
    r = dual_is_jframe(F, G)
    assert r.is_dual
    # companions sit inside N-+ for every dual
    assert r.residuals["companion_containment"] < 1e-8
    assert r.is_jframe_dual == r.range_verdict == w_range_criterion(F, G).passed
    if jf:
        assert r.is_jframe_dual
    assert check_reconstruction(F, G, trials=3, rng=rng).passed


@given(jframes(), seeds)
def test_W_round_trip(F, seed):
    rng = np.random.default_rng(seed)
    W = random_dual_W(F, rng)
    G = generate_dual(F, W)
    assert np.allclose(extract_W(F, G), W, atol=1e-10 * max(1.0, np.abs(W).max()))


@given(jframes(), seeds)
def test_admissible_projection_is_idempotent(F, seed):
    rng = np.random.default_rng(seed)
    W = admissible_W(F, rng.standard_normal((F.space.dim, F.n)))
    assert np.allclose(admissible_W(F, W), W, atol=1e-10 * max(1.0, np.abs(W).max()))
    assert np.abs(W @ synthesis_adjoint(F)).max() < 1e-9 * max(1.0, np.abs(W).max())


@given(jframes(excess_range=(1, 4)), seeds)
@settings(max_examples=20)
def test_minimal_norm_random(F, seed):
    rng = np.random.default_rng(seed)
    duals = [random_dual(F, rng, jframe=bool(k % 2)) for k in range(4)]
    assert minimal_norm_check(F, duals, trials=5, rng=rng).passed
