"""Component-wise path enumeration on the propagation graph of T.

This is a deliberately naive ground truth for the matrix-form memory
operators: every path is walked explicitly, nothing is pruned or cached.
Graph nodes are basis indices; node ``split.coarse[a]`` carries basis
vector ``P[:, a]`` and node ``split.fine[b]`` carries ``Q[:, b]``.
"""
from dataclasses import dataclass

import numpy as np

from .splitting import canonical_basis

__all__ = [
    "BudgetError",
    "PropagationGraph",
    "build_graph",
    "enumerate_fine_paths",
    "componentwise_interpolation",
    "path_weights",
]

MAX_N = 12
MAX_K = 6


class BudgetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PropagationGraph:
    """``neighbors[i]`` maps each ``j`` with ``T_i^j != 0`` to the weight ``T_i^j``."""

    n: int
    neighbors: list
    coarse: frozenset
    fine: frozenset
    coarse_pos: dict  # node -> column of P
    fine_pos: dict    # node -> column of Q


def build_graph(setup, split, basis=None):
    """Transition weights ``T_i^j = g_i^T T g^j`` in the basis, keyed by node."""
    basis = canonical_basis(split) if basis is None else basis
    n = split.n
    G = np.zeros((n, n), dtype=np.complex128)
    G_dual = np.zeros((n, n), dtype=np.complex128)
    G[:, split.coarse] = basis.P
    G[:, split.fine] = basis.Q
    G_dual[split.coarse] = basis.P_dual
    G_dual[split.fine] = basis.Q_dual
    Tt = G_dual @ setup.T @ G
    neighbors = []
    for i in range(n):
        neighbors.append({j: Tt[i, j] for j in range(n) if Tt[i, j] != 0})
    return PropagationGraph(
        n=n, neighbors=neighbors,
        coarse=frozenset(int(c) for c in split.coarse),
        fine=frozenset(int(f) for f in split.fine),
        coarse_pos={int(c): a for a, c in enumerate(split.coarse)},
        fine_pos={int(f): b for b, f in enumerate(split.fine)},
    )


def _check_budget(graph, k):
    if graph.n > MAX_N or k > MAX_K:
        raise BudgetError(f"enumeration budget is n <= {MAX_N}, k <= {MAX_K}; got n={graph.n}, k={k}")


def enumerate_fine_paths(graph, i, k):
    """Accumulate the weights of all backward paths from fine node `i` at time `k`.

    A path steps ``i -> j_1 -> j_2 -> ...`` one time slice back per edge
    and may only pass through fine nodes. It ends at the first coarse node
    it reaches, or at a fine node on time slice 0.

    Returns
    -------
    dict
        ``(origin, time) -> weight``. A coarse origin ``j`` reached after
        ``l + 1`` edges has ``time = k - l - 1``; fine origins have time 0.
    """
    _check_budget(graph, k)
    if i not in graph.fine:
        raise ValueError(f"node {i} is not a fine node")
    out = {}

    def walk(node, depth, weight):
        for j, t in graph.neighbors[node].items():
            w = weight * t
            time = k - depth - 1
            if j in graph.coarse:
                out[(j, time)] = out.get((j, time), 0.0) + w
            elif time == 0:
                out[(j, 0)] = out.get((j, 0), 0.0) + w
            else:
                walk(j, depth + 1, w)

    walk(i, 0, 1.0 + 0.0j)
    return out


def path_weights(graph, k):
    """Matrix-shaped weights from enumeration.

    Returns
    -------
    W : list of (n_f, n_c) ndarrays
        ``W[l]`` collects coarse origins reached after ``l + 1`` edges.
    tail : (n_f, n_f) ndarray
        Fine-only paths of length `k`.
    """
    n_f, n_c = len(graph.fine), len(graph.coarse)
    W = [np.zeros((n_f, n_c), dtype=np.complex128) for _ in range(k)]
    tail = np.zeros((n_f, n_f), dtype=np.complex128)
    for i in graph.fine:
        a = graph.fine_pos[i]
        for (j, time), w in enumerate_fine_paths(graph, i, k).items():
            if j in graph.coarse:
                W[k - time - 1][a, graph.coarse_pos[j]] += w
            else:
                tail[a, graph.fine_pos[j]] += w
    return W, tail


def componentwise_interpolation(graph, coarse_history, k):
    """Fine-error estimate at time `k` from coarse errors at times ``0..k-1``.

    Parameters
    ----------
    coarse_history : sequence of (n_c,) arrays
        Chronological; entry ``a`` of each vector is the error at coarse
        node ``split.coarse[a]``.

    Returns
    -------
    (n_f,) ndarray, ordered like ``split.fine``.
    """
    _check_budget(graph, k)
    if len(coarse_history) != k:
        raise ValueError(f"need {k} coarse error vectors, got {len(coarse_history)}")
    out = np.zeros(len(graph.fine), dtype=np.complex128)
    for i in graph.fine:
        acc = 0.0 + 0.0j
        for (j, time), w in enumerate_fine_paths(graph, i, k).items():
            if j in graph.coarse:
                acc += w * coarse_history[time][graph.coarse_pos[j]]
        out[graph.fine_pos[i]] = acc
    return out
