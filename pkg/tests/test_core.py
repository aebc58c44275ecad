import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from avesolve.core import (
    AveInstance,
    BadParameter,
    SingularMatrix,
    StructureClass as K,
    TriDiagMatrix,
    all_signatures,
    classify,
    det,
    inf_norm,
    inverse,
    is_irreducible,
    is_strict_diag_dominant,
    is_symmetric,
    is_tridiagonal,
    lu_solve,
    make_signature,
    orthant_check,
    parse_signature,
    residual,
    signature_from_mask,
    signature_string,
    strict_sign,
)

HALF_COL = np.array([[0.0, 0.5], [0.0, 0.5]])


def diagdom_sharp_matrix(n):
    # Built by hand here so the test does not depend on the catalog code.
    S = np.zeros((n, n))
    for i in range(1, n):
        S[i, i] = 2 / 3 + 1 / (3 * (n + 1))
    S[0, 0] = 1 / 3 + 1 / (3 * (n + 1))
    S[0, 1:] = 1 / (3 * (n - 1))
    return S


def small_matrices(max_n=6, zero_frac=True):
    return st.integers(1, max_n).flatmap(
        lambda n: arrays(
            float,
            (n, n),
            elements=st.sampled_from([0.0, 0.0, 0.25, -0.5, 1.0, -0.125]) if zero_frac
            else st.floats(-2, 2, allow_nan=False),
        )
    )


# -- inf_norm ---------------------------------------------------------------------


def test_inf_norm_examples():
    assert inf_norm(HALF_COL) == 0.5
    assert inf_norm(np.zeros((4, 4))) == 0.0
    assert inf_norm(diagdom_sharp_matrix(3)) == pytest.approx(0.75, abs=1e-15)


@given(small_matrices(zero_frac=False), st.data())
def test_inf_norm_signature_invariant(S, data):
    n = S.shape[0]
    s1 = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n)))
    s2 = np.array(data.draw(st.lists(st.sampled_from([-1.0, 1.0]), min_size=n, max_size=n)))
    assert inf_norm(s1[:, None] * S * s2[None, :]) == inf_norm(S)


# -- irreducibility ---------------------------------------------------------------


def closure(adj):
    """Boolean transitive closure (Warshall)."""
    r = adj.copy()
    for k in range(len(r)):
        r = r | (r[:, [k]] & r[[k], :])
    return r


def test_irreducible_examples():
    assert not is_irreducible(HALF_COL)
    assert is_irreducible(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert not is_irreducible(-np.eye(3))
    assert is_irreducible(np.array([[0.0]]))


@settings(max_examples=300)
@given(small_matrices())
def test_irreducible_matches_closure(S):
    n = S.shape[0]
    expected = True if n == 1 else bool(closure(S != 0).all())
    assert is_irreducible(S) == expected


def test_irreducible_tridiag_storage():
    m = TriDiagMatrix([0.1, 0.2], [0.0, 0.0, 0.0], [0.3, 0.4])
    assert is_irreducible(m) and is_irreducible(m.to_dense())
    m = TriDiagMatrix([0.1, 0.0], [0.0, 0.0, 0.0], [0.3, 0.4])
    assert not is_irreducible(m) and not is_irreducible(m.to_dense())


# -- dominance, tridiagonality, classes ------------------------------------------


def test_diag_dominance_examples():
    assert is_strict_diag_dominant(np.eye(3))
    assert not is_strict_diag_dominant(HALF_COL)
    for n in range(2, 8):
        assert is_strict_diag_dominant(diagdom_sharp_matrix(n))


def test_tridiagonal_examples():
    assert is_tridiagonal(-np.eye(4))
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert is_tridiagonal(rng.normal(size=(2, 2)))
    S = np.zeros((4, 4))
    S[1, 3] = 0.5
    assert not is_tridiagonal(S)


def test_classify_examples():
    assert classify(0.4 * np.eye(3)) is K.NormBelowHalf
    assert classify(np.array([[0.0, 0.5], [0.5, 0.0]])) is K.IrreducibleNormAtMostHalf
    # -0.9 I: dominant but above 2/3, so it lands in the tridiagonal class.
    assert classify(-0.9 * np.eye(5)) is K.TridiagonalNormBelowOne
    # any 2x2 matrix is tridiagonal
    assert classify(HALF_COL) is K.TridiagonalNormBelowOne
    S = np.zeros((4, 4))
    S[:, 1] = 0.5
    assert classify(S) is K.Unclassified
    assert classify(-np.eye(3)) is K.Unclassified
    assert classify(diagdom_sharp_matrix(4)) is K.Unclassified  # 2/3 + 1/15 > 2/3
    S = np.diag([0.6, -0.6, 0.6])
    S[0, 2] = 0.05
    assert classify(S) is K.DiagDominantNormAtMostTwoThirds


@settings(max_examples=200)
@given(small_matrices(zero_frac=False))
def test_classify_follows_definitions(S):
    kind = classify(S)
    norm = inf_norm(S)
    expected = K.Unclassified
    if norm < 0.5:
        expected = K.NormBelowHalf
    elif norm <= 0.5 and is_irreducible(S):
        expected = K.IrreducibleNormAtMostHalf
    elif norm <= 2 / 3 and all(
        2 * abs(S[i, i]) > np.abs(S[i]).sum() for i in range(len(S))
    ):
        expected = K.DiagDominantNormAtMostTwoThirds
    elif norm < 1 and np.all(np.triu(S, 2) == 0) and np.all(np.tril(S, -2) == 0):
        expected = K.TridiagonalNormBelowOne
    assert kind is expected


# -- TriDiagMatrix ----------------------------------------------------------------


@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_tridiag_storage_matches_dense(n, seed):
    rng = np.random.default_rng(seed)
    m = TriDiagMatrix(rng.normal(size=n - 1), rng.normal(size=n), rng.normal(size=n - 1))
    a = m.to_dense()
    x = rng.normal(size=n)
    np.testing.assert_allclose(m.matvec(x), a @ x, rtol=1e-14, atol=1e-14)
    assert inf_norm(m) == pytest.approx(inf_norm(a), rel=1e-15)  # summation order differs
    assert np.array_equal(TriDiagMatrix.from_dense(a).to_dense(), a)
    assert is_symmetric(m) == is_symmetric(a)
    assert is_strict_diag_dominant(m) == is_strict_diag_dominant(a)


def test_tridiag_validation():
    with pytest.raises(BadParameter):
        TriDiagMatrix([1.0], [1.0, 2.0, 3.0], [1.0, 2.0])
    with pytest.raises(BadParameter):
        TriDiagMatrix.from_dense(np.ones((3, 3)))
    m = TriDiagMatrix([], [0.5], [])
    assert m.n == 1 and m.to_dense().tolist() == [[0.5]]


def test_instance_validation():
    with pytest.raises(BadParameter):
        AveInstance(np.eye(2), [1.0, 2.0, 3.0])
    with pytest.raises(BadParameter):
        AveInstance(np.ones((2, 3)), [1.0, 2.0])
    inst = AveInstance(np.eye(2), [1.0, 2.0])
    with pytest.raises(ValueError):
        inst.rhs[0] = 5.0


# -- signatures -------------------------------------------------------------------


def test_signatures():
    assert signature_string(make_signature([1, -1, 1])) == "+-+"
    assert parse_signature("-+").tolist() == [-1, 1]
    with pytest.raises(BadParameter):
        make_signature([1, 0])
    with pytest.raises(BadParameter):
        parse_signature("+x")
    assert signature_from_mask(0, 3).tolist() == [1, 1, 1]
    assert signature_from_mask(0b101, 3).tolist() == [-1, 1, -1]
    sigs = all_signatures(3)
    assert sigs.shape == (8, 3)
    assert len({signature_string(s) for s in sigs}) == 8
    for mask, s in enumerate(sigs):
        assert np.array_equal(s, signature_from_mask(mask, 3))


def test_strict_sign():
    assert strict_sign([-2.0, 0.0, 3.0]).tolist() == [-1, 0, 1]


# -- residual / orthant -----------------------------------------------------------


def test_residual_examples():
    c = np.array([0.3, -1.2])
    assert not residual(np.zeros((2, 2)), c, c).any()
    assert not residual(HALF_COL, [0.0, 1.0], [-0.5, 0.5]).any()


@given(small_matrices(zero_frac=False), st.data())
def test_residual_of_constructed_rhs(S, data):
    n = S.shape[0]
    z = np.array(data.draw(st.lists(st.floats(-4, 4), min_size=n, max_size=n)))
    c = z - S @ np.abs(z)
    assert np.abs(residual(S, z, c)).max() <= 1e-12 * (1 + np.abs(z).max())


def test_orthant_check():
    assert orthant_check([0.0, 0.0], [1, -1])
    assert orthant_check([1.0, -2.0], [1, -1])
    assert not orthant_check([1.0, -2.0], [1, 1])
    assert orthant_check([1.0, -1e-14], [1, 1], atol=1e-12)


# -- linear algebra ---------------------------------------------------------------


def test_lu_solve_examples():
    b = np.array([0.7, -1.1, 2.0])
    assert np.array_equal(lu_solve(np.eye(3), b), b)
    np.testing.assert_allclose(lu_solve([[1.0, -0.5], [0.0, 0.5]], [1.0, 1.0]), [2.0, 2.0])
    with pytest.raises(SingularMatrix):
        lu_solve(np.zeros((2, 2)), [1.0, 1.0])


@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_lu_matches_numpy(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + n * np.eye(n)
    b = rng.normal(size=n)
    np.testing.assert_allclose(lu_solve(a, b), np.linalg.solve(a, b), rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(det(a), np.linalg.det(a), rtol=1e-10)
    np.testing.assert_allclose(inverse(a) @ a, np.eye(n), atol=1e-10)
