import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from avesolve.core import AveInstance, DimensionTooLarge, SingularMatrix, StructureClass as K
from avesolve.corpus import gen_random
from avesolve.oracle import (
    charpoly,
    charpoly_rho_s,
    check_unique_solvability,
    enumerate_solutions,
    equilibrium_residual,
    equilibrium_to_ave,
    join_solution,
    lcp_violation,
    p_matrix_check,
    principal_minors,
    real_roots,
    sign_real_spectral_radius,
    signature_determinants,
    split_solution,
    to_lcp,
)
from avesolve.sge_dense import sge_solve

HALF_COL = np.array([[0.0, 0.5], [0.0, 0.5]])


def test_enumerate_trivial():
    en = enumerate_solutions(AveInstance(np.zeros((2, 2)), [3.0, -4.0]))
    assert en.count == 1 and not en.degenerate
    assert en.unique().tolist() == [3.0, -4.0]


def test_enumerate_boundary_dedup():
    en = enumerate_solutions(AveInstance(HALF_COL, [-0.5, 0.5]))
    assert en.count == 1
    assert en.unique().tolist() == [0.0, 1.0]
    firsts = sorted(int(s[0]) for s in en.signatures[0])
    assert firsts == [-1, 1]


def test_enumerate_degenerate():
    en = enumerate_solutions(AveInstance(-np.eye(2), [0.0, 0.0]))
    assert en.degenerate
    assert any(np.array_equal(s, [-1, -1]) for s in en.singular_signatures)
    assert en.unique() is None


def test_enumerate_multiple_solutions():
    # z - 2|z| = -1 has z = 1 and z = -1/3
    en = enumerate_solutions(AveInstance([[2.0]], [-1.0]))
    assert en.count == 2
    assert sorted(float(z[0]) for z in en.solutions) == pytest.approx([-1 / 3, 1.0])


def test_limit():
    with pytest.raises(DimensionTooLarge):
        enumerate_solutions(AveInstance(np.zeros((5, 5)), np.ones(5)), limit=4)
    with pytest.raises(DimensionTooLarge):
        sign_real_spectral_radius(np.zeros((9, 9)))


def test_rho_s_examples():
    assert sign_real_spectral_radius(-np.eye(2)) == 1.0
    assert sign_real_spectral_radius(np.zeros((3, 3))) == 0.0
    assert sign_real_spectral_radius(HALF_COL) == 0.5
    # rotation: no real eigenvalue for S, but Sigma S has +-1
    assert sign_real_spectral_radius(np.array([[0.0, 1.0], [-1.0, 0.0]])) == pytest.approx(1.0)


def test_charpoly_and_roots():
    a = np.array([[2.0, 1.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, -1.0]])
    assert charpoly(a) == pytest.approx(np.poly(a).tolist())
    assert sorted(real_roots(charpoly(a))) == pytest.approx([-1.0, 2.0, 3.0])
    assert real_roots([1.0, 0.0, 1.0]) == []
    assert sorted(real_roots([1.0, -3.0, 3.0, -1.0])) == pytest.approx([1.0] * 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 3), st.integers(0, 10**6))
def test_charpoly_cross_check(n, seed):
    S = np.random.default_rng(seed).uniform(-1.5, 1.5, (n, n))
    a = sign_real_spectral_radius(S, cross_check=False)
    assert charpoly_rho_s(S) == pytest.approx(a, rel=1e-6, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_rho_bounded_by_norm_and_invariant(n, seed):
    rng = np.random.default_rng(seed)
    S = rng.uniform(-1, 1, (n, n))
    rho = sign_real_spectral_radius(S)
    assert rho <= np.abs(S).sum(axis=1).max() + 1e-9
    s1 = rng.choice([-1.0, 1.0], n)
    s2 = rng.choice([-1.0, 1.0], n)
    assert sign_real_spectral_radius(s1[:, None] * S * s2) == pytest.approx(rho, abs=1e-9)


def test_report_examples():
    r = check_unique_solvability(np.zeros((2, 2)))
    assert r.rho_s == 0.0 and r.det_all_positive and r.p_matrix is True
    assert r.solution_count == 1
    r = check_unique_solvability(0.4 * np.eye(2))
    assert r.rho_below_one and r.det_all_positive and r.p_matrix and r.rhs_all_unique
    r = check_unique_solvability(-np.eye(2))
    assert not r.det_all_positive and r.min_det == 0.0
    r = check_unique_solvability(np.eye(2))  # I - S singular
    assert r.p_matrix is None and r.as_dict()["p_matrix"] == "undefined"


def test_determinants():
    S = 0.4 * np.eye(2)
    dets = signature_determinants(S)
    assert sorted(dets) == pytest.approx(sorted([0.36, 0.84, 0.84, 1.96]))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6), st.floats(0.3, 2.0))
def test_unique_solvability_equivalences(n, seed, scale):
    rng = np.random.default_rng(seed)
    S = rng.uniform(-1, 1, (n, n))
    S *= scale / np.abs(S).sum(axis=1).max()
    rho = sign_real_spectral_radius(S)
    dets = signature_determinants(S)
    if abs(rho - 1) < 1e-6 or np.abs(dets).min() < 1e-9:
        return
    assert (rho < 1) == bool(np.all(dets > 0))
    if rho < 1:
        M = np.linalg.solve(np.eye(n) - S, np.eye(n) + S)
        assert p_matrix_check(M)
        c = rng.uniform(-1, 1, n)
        assert enumerate_solutions(AveInstance(S, c)).unique() is not None


def test_p_matrix_examples():
    assert p_matrix_check(np.eye(3))
    assert not p_matrix_check(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert principal_minors(np.array([[1.0, 2.0], [2.0, 1.0]]))[-1] == pytest.approx(-3.0)
    M = np.linalg.solve(np.eye(2) - 0.4 * np.eye(2), np.eye(2) + 0.4 * np.eye(2))
    assert p_matrix_check(M)


def test_to_lcp_examples():
    c = np.array([1.0, -2.0])
    lcp = to_lcp(AveInstance(np.zeros((2, 2)), c))
    assert np.array_equal(lcp.M, np.eye(2)) and np.array_equal(lcp.q, c)
    lcp = to_lcp(AveInstance(0.4 * np.eye(2), [1.0, 0.0]))
    np.testing.assert_allclose(lcp.M, (1.4 / 0.6) * np.eye(2))
    np.testing.assert_allclose(lcp.q, [1 / 0.6, 0.0])
    with pytest.raises(SingularMatrix):
        to_lcp(AveInstance(np.eye(2), c))


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(0, 10**6))
def test_lcp_round_trip(n, seed):
    inst, _ = gen_random(K.NormBelowHalf, n, 0.45, seed, zero_prob=0.2)
    z = sge_solve(inst).z
    u, w = split_solution(z)
    assert np.all(u >= 0) and np.all(w >= 0) and u @ w == 0.0
    assert np.array_equal(join_solution(u, w), z)
    assert lcp_violation(to_lcp(inst), u, w) <= 1e-9


def test_equilibrium_examples():
    inst = equilibrium_to_ave(np.zeros((2, 2)), [1.0, 1.0])
    assert inst.dense().tolist() == [[-1.0, 0.0], [0.0, -1.0]]
    assert inst.rhs.tolist() == [2.0, 2.0]
    inst = equilibrium_to_ave([[1.0]], [3.0])
    assert inst.dense()[0, 0] == pytest.approx(-1 / 3)
    assert inst.rhs[0] == pytest.approx(2.0)
    x = sge_solve(inst).z
    assert x[0] == pytest.approx(1.5)
    assert equilibrium_residual([[1.0]], [3.0], x)[0] == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(SingularMatrix):
        equilibrium_to_ave(-0.5 * np.eye(2), [1.0, 1.0])
