import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaxamg import problems
from relaxamg.relaxation import build_setup
from relaxamg.splitting import (
    CFSplit, Restriction, TransferBasis, basis_from_columns, canonical_basis, check_orthogonality_RAQ,
    every_nth, every_other, explicit_split, random_basis, red_black,
)
from relaxamg.transfer_flow import ideal_restriction


def test_split_validation():
    with pytest.raises(ValueError):
        explicit_split(4, [0, 0])
    with pytest.raises(ValueError):
        explicit_split(4, [5])
    with pytest.raises(ValueError):
        explicit_split(3, [0, 1, 2])  # no fine points
    with pytest.raises(ValueError):
        explicit_split(3, [])


def test_split_strategies():
    np.testing.assert_array_equal(every_other(6).coarse, [1, 3, 5])
    np.testing.assert_array_equal(every_nth(9, 3).coarse, [2, 5, 8])
    s = red_black(3, 3)
    assert s.n_c == 4 and s.n_f == 5
    np.testing.assert_array_equal(np.sort(s.perm), np.arange(9))


def test_canonical_n2():
    b = canonical_basis(explicit_split(2, [0]))
    np.testing.assert_array_equal(b.P, [[1], [0]])
    np.testing.assert_array_equal(b.Q, [[0], [1]])
    np.testing.assert_array_equal(b.P_dual, b.P.T)
    np.testing.assert_array_equal(b.Q_dual, b.Q.T)


def test_canonical_n3_completeness():
    b = canonical_basis(explicit_split(3, [1]))
    np.testing.assert_array_equal(b.P[:, 0], [0, 1, 0])
    np.testing.assert_array_equal(b.P @ b.P_dual + b.Q @ b.Q_dual, np.eye(3))


def test_random_split_invariants(rng):
    split = explicit_split(8, rng.choice(8, 3, replace=False))
    assert canonical_basis(split).max_residual() <= 1e-15


def test_completion_from_identity_columns():
    split = explicit_split(5, [0, 1])
    ref = canonical_basis(split)
    b = basis_from_columns(ref.P, ref.P_dual)
    for name in ("P", "Q", "P_dual", "Q_dual"):
        np.testing.assert_allclose(getattr(b, name), getattr(ref, name), atol=1e-15)


def test_completion_2x2():
    b = basis_from_columns(np.array([[1.0], [1.0]]), np.array([[1.0, 0.0]]))
    np.testing.assert_allclose(b.Q.ravel(), [0, 1], atol=1e-15)
    np.testing.assert_allclose(b.Q_dual.ravel(), [-1, 1], atol=1e-15)


def test_completion_random(rng):
    G = np.eye(10) + 0.3 * rng.standard_normal((10, 10))
    b = basis_from_columns(G[:, :4], np.linalg.inv(G)[:4])
    assert b.max_residual() <= 1e-11


def test_completion_rank_deficient():
    P = np.ones((4, 2))
    with pytest.raises(ValueError):
        basis_from_columns(P, np.ones((2, 4)))


def test_restriction_rank_and_rhat(rng):
    with pytest.raises(ValueError):
        Restriction(np.ones((2, 4)))
    S = build_setup(problems.poisson1d(6), "jacobi")
    R = rng.standard_normal((2, 6))
    r = Restriction.from_setup(R, S)
    np.testing.assert_allclose(r.R_hat, R @ S.M)


def test_raq():
    S = build_setup(problems.advdiff1d(16, 10.0), "jacobi")
    split = every_other(16)
    b = canonical_basis(split)
    assert check_orthogonality_RAQ(ideal_restriction(S, split), S, b) <= 1e-12
    assert check_orthogonality_RAQ(b.P_dual, S, b) > 0.1


def test_basis_rejects_bad_shapes():
    with pytest.raises(ValueError):
        TransferBasis(np.ones((3, 1)), np.ones((3, 1)), np.ones((1, 3)), np.ones((2, 3)))


@given(st.integers(3, 16), st.data())
def test_projection_properties(n, data):
    n_c = data.draw(st.integers(1, n - 1))
    seed = data.draw(st.integers(0, 2**31 - 1))
    r = np.random.default_rng(seed)
    b = random_basis(n, n_c, r)
    PP, QQ = b.P @ b.P_dual, b.Q @ b.Q_dual
    assert np.linalg.norm(PP @ PP - PP) <= 1e-12
    assert np.linalg.norm(QQ @ QQ - QQ) <= 1e-12
    e = r.standard_normal(n) + 1j * r.standard_normal(n)
    assert np.linalg.norm(e - PP @ e - QQ @ e) <= 1e-13 * np.linalg.norm(e)
    assert b.max_residual() <= 1e-12
