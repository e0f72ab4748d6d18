import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    brute_force_gram,
    sampled_numerical_radius,
    sampled_seminorm,
    spectral_radius_oracle,
    theta_grid_radius,
)
from semiop.errors import NotAdjointable
from semiop.radii import (
    INFINITE,
    a_joint_spectral_radius,
    a_maximal_numerical_radius,
    a_numerical_radius,
    a_operator_seminorm,
    a_spectral_radius,
    analyze,
    classical_numerical_radius,
    classical_spectral_radius,
    gelfand_sequence,
    joint_gram,
    kittaneh_bound,
    power_seminorms,
)
from semiop.semispace import compress, make_context, sharp_adjoint
from semiop.verify import demo_ex01, random_member, random_weight

PHI = (1 + math.sqrt(5)) / 2
I2 = np.eye(2)
JORDAN = np.array([[1, 1], [0, 1]], dtype=complex)
NILP = np.array([[0, 1], [0, 0]], dtype=complex)
A_ONES = np.array([[1, 1], [1, 1]], dtype=complex)
T_ONES = np.array([[2, 2], [0, 0]], dtype=complex)
A3 = np.array([[2, 0, 2], [0, 1, 0], [2, 0, 2]], dtype=complex)
T3 = np.array([[1, 0, 1], [0, 0, 0], [0, 0, 0]], dtype=complex)
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)


def member_sample(seed, max_dim=6):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, max_dim + 1))
    ctx = make_context(random_weight(rng, dim, int(rng.integers(1, dim + 1))))
    return rng, ctx, random_member(rng, ctx)


def test_infinite_marker():
    assert str(INFINITE) == "inf"
    assert pickle.loads(pickle.dumps(INFINITE)) is INFINITE
    with pytest.raises(TypeError):
        INFINITE < 1.0


def test_seminorm_examples(rng):
    assert a_operator_seminorm(make_context(I2), JORDAN) == pytest.approx(PHI, abs=1e-12)
    ctx = make_context(A_ONES)
    assert a_operator_seminorm(ctx, T_ONES) == pytest.approx(2.0, abs=1e-12)
    assert sampled_seminorm(A_ONES, T_ONES, rng) == pytest.approx(2.0, rel=1e-9)
    A, T = demo_ex01(5)
    assert a_operator_seminorm(make_context(A), T, require_member_=False) <= 1e-10
    with pytest.raises(NotAdjointable):
        a_operator_seminorm(make_context(A), T)


def test_seminorm_of_non_member_uses_restricted_formula():
    ctx = make_context(np.diag([1.0, 0.0]))
    assert a_operator_seminorm(ctx, SWAP, require_member_=False) == 0.0


@pytest.mark.parametrize(
    "M, expected",
    [(np.diag([1, 1j]), 1.0), (NILP, 0.5), (JORDAN, 1.5), (np.array([[1, 0, 0], [0, 0, 2], [0, 0, 0]]), 1.0)],
)
def test_classical_numerical_radius_examples(M, expected):
    assert classical_numerical_radius(M) == pytest.approx(expected, abs=1e-12)


def test_numerical_radius_nilpotent_against_fine_grid():
    assert theta_grid_radius(NILP) == pytest.approx(classical_numerical_radius(NILP), abs=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_numerical_radius_against_grid_oracle(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    assert classical_numerical_radius(M) == pytest.approx(theta_grid_radius(M, points=200_000), abs=1e-7)


def test_a_numerical_radius_examples(rng):
    assert a_numerical_radius(make_context(np.diag([1.0, 0.0])), SWAP) is INFINITE
    assert a_numerical_radius(make_context(I2), JORDAN) == pytest.approx(1.5, abs=1e-12)
    assert a_numerical_radius(make_context(A3), T3) == pytest.approx(1.0, abs=1e-12)
    assert sampled_numerical_radius(A3, T3, rng) == pytest.approx(1.0, abs=1e-3)


def test_gelfand_examples():
    ctx = make_context(I2)
    trace = gelfand_sequence(ctx, np.zeros((2, 2)), 5)
    assert all(v == 0 for _, v in trace.estimates)
    trace = gelfand_sequence(ctx, np.diag([2.0, 1.0]), 10)
    assert all(v == pytest.approx(2.0) for _, v in trace.estimates)
    trace = gelfand_sequence(ctx, JORDAN, 64)
    values = [v for _, v in trace.estimates]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))
    assert abs(trace.final - 1.0) <= 0.08
    # (n+sqrt(n^2+4))/2 is the largest singular value of the n-th power
    n = 64
    assert trace.final == pytest.approx(((n + math.sqrt(n * n + 4)) / 2) ** (1 / n), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gelfand_subadditive_and_inf(seed):
    _, ctx, T = member_sample(seed)
    trace = gelfand_sequence(ctx, T, 24)
    logs = {n: math.log(v) * n for n, v in trace.estimates if v > 0}
    for m in logs:
        for n in logs:
            if m + n in logs:
                assert logs[m + n] <= logs[m] + logs[n] + 1e-9 * max(1.0, abs(logs[m] + logs[n]))
    r = a_spectral_radius(ctx, T)
    assert trace.infimum >= r - 1e-8 * max(1.0, r)


def test_spectral_radius_examples():
    assert a_spectral_radius(make_context(I2), JORDAN) == pytest.approx(1.0, abs=1e-6)
    assert a_spectral_radius(make_context(np.eye(3)), np.array([[1, 0, 0], [0, 0, 2], [0, 0, 0]])) == pytest.approx(
        1.0, abs=1e-9
    )
    ctx = make_context(A_ONES)
    S = compress(ctx, T_ONES)
    assert a_spectral_radius(ctx, T_ONES) == pytest.approx(2.0, abs=1e-12)
    assert spectral_radius_oracle(S) == pytest.approx(2.0, abs=1e-12)
    assert a_spectral_radius(make_context(I2), np.zeros((2, 2))) == 0.0


def test_spectral_radius_trace_reports_history():
    r, history, converged = classical_spectral_radius(JORDAN, trace=True)
    assert converged and history[0] == (1, pytest.approx(PHI))
    assert [n for n, _ in history] == [2**k for k in range(len(history))]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_spectral_radius_against_char_poly_oracle(seed):
    _, ctx, T = member_sample(seed)
    r = a_spectral_radius(ctx, T)
    assert r == pytest.approx(spectral_radius_oracle(compress(ctx, T)), abs=1e-6 * max(1.0, r))


def test_kittaneh_examples():
    ctx = make_context(I2)
    assert kittaneh_bound(ctx, NILP) == pytest.approx(0.5)
    assert a_numerical_radius(ctx, NILP) == pytest.approx(0.5, abs=1e-12)
    assert kittaneh_bound(ctx, I2) == pytest.approx(1.0)
    sq = np.linalg.svd(np.array([[1, 2], [0, 1]]), compute_uv=False)[0]
    k = kittaneh_bound(ctx, JORDAN)
    assert k == pytest.approx(0.5 * (PHI + math.sqrt(sq)))
    assert k >= 1.5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_radii_bundle_invariants(seed):
    _, ctx, T = member_sample(seed)
    rep = analyze(ctx, T)
    b = rep.radii
    tol = 1e-8 * max(1.0, b.a_norm)
    assert b.a_spectral_radius <= b.a_numerical_radius + tol
    assert b.a_numerical_radius <= b.a_norm + tol
    assert b.a_norm <= 2 * b.a_numerical_radius + tol
    assert b.a_numerical_radius <= b.kittaneh_bound + tol
    assert b.kittaneh_bound <= b.a_norm + tol
    assert b.omega_max <= b.a_numerical_radius + tol


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_seminorm_zero_characterization(seed):
    rng, ctx, T = member_sample(seed)
    # a member with A T P = 0 maps everything into N(A)
    Vn = ctx.null_basis
    Z = Vn @ (rng.standard_normal((Vn.shape[1], ctx.dim))) if Vn.shape[1] else np.zeros((ctx.dim, ctx.dim))
    for X in (T, Z):
        zero_norm = a_operator_seminorm(ctx, X) <= 1e-10
        zero_atp = np.linalg.norm(ctx.A @ X @ ctx.P) <= 1e-10 * max(1.0, ctx.norm_A * np.linalg.norm(X))
        assert zero_norm == zero_atp
    assert a_operator_seminorm(ctx, Z) <= 1e-10


def test_power_seminorms_match_gelfand():
    ctx = make_context(I2)
    norms = power_seminorms(ctx, JORDAN, 5)
    trace = gelfand_sequence(ctx, JORDAN, 5)
    for n, (m, v) in zip(range(1, 6), trace.estimates):
        assert norms[n - 1] ** (1 / n) == pytest.approx(v, rel=1e-12)


def test_jsr_examples():
    ctx = make_context(I2)
    trace = a_joint_spectral_radius(ctx, [I2, I2])
    assert trace.final == pytest.approx(math.sqrt(2), abs=1e-9)
    trace = a_joint_spectral_radius(ctx, [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert trace.final == pytest.approx(1.0, abs=1e-12)
    assert a_joint_spectral_radius(ctx, [np.zeros((2, 2))] * 2).final == 0.0
    with pytest.raises(NotAdjointable):
        a_joint_spectral_radius(make_context(np.diag([1.0, 0.0])), [SWAP])


def test_jsr_jordan_doubling_schedule():
    ctx = make_context(I2)
    trace = a_joint_spectral_radius(ctx, [JORDAN], n_max=2048)
    assert [n for n, _ in trace.estimates] == [2**k for k in range(12)]
    # e_n = ||J^n||^(1/n) exactly, with ||J^n|| = (n + sqrt(n^2 + 4)) / 2
    n = 2048
    assert trace.final == pytest.approx(((n + math.sqrt(n * n + 4)) / 2) ** (1 / n), rel=1e-12)
    assert abs(a_joint_spectral_radius(ctx, [JORDAN]).final - 1.0) <= 1e-3


def test_jsr_non_power_of_two_length():
    ctx = make_context(I2)
    trace = a_joint_spectral_radius(ctx, [JORDAN], n_max=100)
    assert trace.estimates[-1][0] == 100
    sigma = np.linalg.svd(np.linalg.matrix_power(JORDAN, 100), compute_uv=False)[0]
    assert trace.final == pytest.approx(sigma ** (1 / 100), rel=1e-12)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_joint_gram_against_brute_force(d, n):
    rng = np.random.default_rng(100 * d + n)
    ctx = make_context(random_weight(rng, 4, 3))
    ops = [random_member(rng, ctx) for _ in range(d)]
    G = brute_force_gram(ops, lambda X: sharp_adjoint(ctx, X), n)
    M = joint_gram(ctx, ops, n)
    assert np.linalg.norm(M - G) <= 1e-10 * np.linalg.norm(G)
    e = a_joint_spectral_radius(ctx, ops, n_max=n).final
    assert e == pytest.approx(a_operator_seminorm(ctx, G) ** (1 / (2 * n)), rel=1e-10)


def test_jsr_linear_fallback_matches_superoperator():
    from semiop import radii

    rng = np.random.default_rng(5)
    ctx = make_context(random_weight(rng, 5, 4))
    ops = [random_member(rng, ctx) for _ in range(2)]
    reduced = [compress(ctx, T) for T in ops]
    fast = a_joint_spectral_radius(ctx, ops, n_max=64)
    slow = radii._jsr_linear(reduced, 64, ctx.cfg)
    assert dict(fast.estimates)[64] == pytest.approx(dict(slow.estimates)[64], rel=1e-10)


def test_maximal_numerical_radius_examples(rng):
    ctx = make_context(I2)
    assert a_maximal_numerical_radius(ctx, np.diag([2.0, 1.0])) == pytest.approx(2.0)
    assert a_maximal_numerical_radius(ctx, I2) == pytest.approx(1.0)
    w = a_maximal_numerical_radius(ctx, JORDAN)
    assert w < 1.5 - 1e-3
    # sampling oracle: near-norming unit vectors
    X = rng.standard_normal((2, 400_000)) + 1j * rng.standard_normal((2, 400_000))
    X /= np.linalg.norm(X, axis=0)
    norming = np.linalg.norm(JORDAN @ X, axis=0) >= PHI - 1e-6
    best = np.max(np.abs(np.einsum("ij,ij->j", X.conj(), JORDAN @ X))[norming])
    assert best == pytest.approx(w, abs=1e-3)
    assert a_maximal_numerical_radius(ctx, np.zeros((2, 2))) == 0.0


def test_analyze_non_member():
    rep = analyze(make_context(np.diag([1.0, 0.0])), SWAP)
    assert not rep.member and rep.a_numerical_radius is INFINITE
    assert rep.radii is None
    assert any("W_A(T) = C" in n for n in rep.notes)


def test_analyze_trace():
    rep = analyze(make_context(I2), JORDAN, trace_n=8)
    assert len(rep.gelfand.estimates) == 8
    np.testing.assert_allclose(rep.sharp, JORDAN.conj().T)
