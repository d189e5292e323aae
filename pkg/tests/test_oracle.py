import numpy as np
import pytest
from hypothesis import given, strategies as st

from relaxamg import problems
from relaxamg.memory import build_memory, interpolate_memory
from relaxamg.oracle import BudgetError, build_graph, componentwise_interpolation, enumerate_fine_paths, path_weights
from relaxamg.relaxation import build_setup
from relaxamg.splitting import canonical_basis, every_nth, every_other, explicit_split, random_basis


def ring(n, shift=0.1):
    A = problems.poisson1d(n).toarray()
    A[0, -1] = A[-1, 0] = -1.0
    return A + shift * np.eye(n)


def test_k1_raw_weights():
    setup = build_setup(problems.advdiff1d(6, 4.0), "jacobi")
    split = every_other(6)
    W, tail = path_weights(build_graph(setup, split), 1)
    T = setup.T
    np.testing.assert_array_equal(W[0], T[np.ix_(split.fine, split.coarse)])
    np.testing.assert_array_equal(tail, T[np.ix_(split.fine, split.fine)])


def test_no_fine_neighbours(poisson3):
    setup, split, _ = poisson3
    g = build_graph(setup, split)
    for i in (0, 2):
        assert enumerate_fine_paths(g, i, 3) == {(1, 2): 0.5}


def test_ring6_dense_powers():
    setup = build_setup(ring(6), "jacobi")
    split = every_other(6)
    b = canonical_basis(split)
    W, tail = path_weights(build_graph(setup, split), 4)
    Tff = setup.T[np.ix_(split.fine, split.fine)]
    Tfc = setup.T[np.ix_(split.fine, split.coarse)]
    for l in range(4):
        assert np.linalg.norm(W[l] - np.linalg.matrix_power(Tff, l) @ Tfc) <= 1e-13
    assert np.linalg.norm(tail - np.linalg.matrix_power(Tff, 4)) <= 1e-13


def test_componentwise_examples(poisson3, rng):
    setup, split, basis = poisson3
    g = build_graph(setup, split)
    np.testing.assert_array_equal(componentwise_interpolation(g, [np.zeros(1)], 1), np.zeros(2))
    e = rng.standard_normal(1)
    np.testing.assert_allclose(componentwise_interpolation(g, [e], 1), 0.5 * np.array([e[0], e[0]]))
    setup = build_setup(problems.poisson1d(8), "jacobi")
    split = every_other(8)
    b = canonical_basis(split)
    hist = [rng.standard_normal(4) for _ in range(3)]
    got = componentwise_interpolation(build_graph(setup, split), hist, 3)
    assert np.linalg.norm(got - interpolate_memory(build_memory(setup, b, None, 3), hist)) <= 1e-12


def test_budget():
    setup = build_setup(problems.poisson1d(14), "jacobi")
    g = build_graph(setup, every_other(14))
    with pytest.raises(BudgetError):
        path_weights(g, 2)
    g = build_graph(build_setup(problems.poisson1d(6), "jacobi"), every_other(6))
    with pytest.raises(BudgetError):
        path_weights(g, 7)
    with pytest.raises(ValueError):
        enumerate_fine_paths(g, 1, 2)  # coarse node


@given(st.sampled_from(["chain", "ring", "advdiff"]), st.integers(4, 8), st.integers(1, 4),
       st.sampled_from(["every_other", "every_third", "random", "random_basis"]), st.integers(0, 2**31 - 1))
def test_path_matrix_duality(kind, n, k, strategy, seed):
    r = np.random.default_rng(seed)
    A = {"chain": lambda: problems.poisson1d(n).toarray(), "ring": lambda: ring(n),
         "advdiff": lambda: problems.advdiff1d(n, float(r.uniform(0, 20))).toarray()}[kind]()
    setup = build_setup(A, "jacobi")
    if strategy == "every_other":
        split = every_other(n)
    elif strategy == "every_third":
        split = every_nth(n, 3)
    else:
        split = explicit_split(n, r.choice(n, int(r.integers(1, n)), replace=False))
    basis = random_basis(n, split.n_c, r) if strategy == "random_basis" else canonical_basis(split)
    W, tail = path_weights(build_graph(setup, split, basis), k)
    mem = build_memory(setup, basis, None, k)
    for a, b in zip(W, mem.W):
        assert np.linalg.norm(a - b) <= 1e-12
    assert np.linalg.norm(tail - mem.Tqq_powers[k]) <= 1e-12
