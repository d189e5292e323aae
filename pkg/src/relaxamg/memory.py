"""Memory-bearing operators of the coarse-grained relaxation.

Notation: ``S = Q_dual T Q`` is the compatible-relaxation propagator and
``B = Q_dual T P`` the coarse-to-fine coupling (``B = -Q_dual A_hat P``
because ``Q_dual P = 0``). Then

* interpolation weights ``W^(l+1) = S^l B``
* generalized prolongations ``P^(0) = P``, ``P^(l) = Q W^(l)``
* coarse propagators ``T^(l) = P_dual T P^(l)``
* coarse operators ``A_sigma^(l) = R A_hat P^(l)``

for ``l = 0..k``. Powers of `S` are built by repeated multiplication so
the identity checks run in the same arithmetic as the operators.
"""
from dataclasses import dataclass

import numpy as np

from .linalg import matrix_power_list, spectral_radius
from .splitting import Restriction

__all__ = [
    "MemoryOperators",
    "NoiseTerm",
    "build_memory",
    "reconstruct_fine_error",
    "interpolate_memory",
    "noise",
    "coarse_relaxation_step",
    "cr_diagnostics",
    "effective_prolongation",
]


def _R(R):
    return R.R if isinstance(R, Restriction) else np.asarray(R, dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class MemoryOperators:
    k: int
    W: list          # W[l - 1] = W^(l), l = 1..k
    P_gen: list      # P^(0..k)
    T_coarse: list   # T^(0..k)
    A_sigma: list    # A_sigma^(0..k), empty when no restriction was given
    Tqq: np.ndarray
    Tqp: np.ndarray
    Tqq_powers: list  # S^0..S^k


@dataclass(frozen=True, eq=False)
class NoiseTerm:
    eta: np.ndarray
    k: int


def build_memory(setup, basis, R=None, k=1):
    """Assemble every memory operator up to depth `k`.

    Parameters
    ----------
    setup : RelaxationSetup
    basis : TransferBasis
    R : (n_c, n) array_like or Restriction, optional
        Restriction for the coarse operators ``A_sigma^(l)``.
    k : int
        Relaxation depth, ``k >= 1``.

    Returns
    -------
    MemoryOperators
    """
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    T = setup.T
    Tqq = basis.Q_dual @ T @ basis.Q
    Tqp = basis.Q_dual @ T @ basis.P
    S_pow = matrix_power_list(Tqq, k)
    W = [Tqp]
    for _ in range(k - 1):
        W.append(Tqq @ W[-1])
    P_gen = [basis.P] + [basis.Q @ w for w in W]
    PdT = basis.P_dual @ T
    T_coarse = [PdT @ p for p in P_gen]
    A_sigma = []
    if R is not None:
        RA = _R(R) @ setup.A_hat
        A_sigma = [RA @ p for p in P_gen]
    return MemoryOperators(k=k, W=W, P_gen=P_gen, T_coarse=T_coarse,
                           A_sigma=A_sigma, Tqq=Tqq, Tqp=Tqp, Tqq_powers=S_pow)


def _series(mem, series, name):
    series = [np.asarray(s, dtype=np.complex128) for s in series]
    if len(series) != mem.k:
        raise ValueError(f"{name} must hold {mem.k} vectors (times 0..{mem.k - 1}), got {len(series)}")
    return series


def interpolate_memory(mem, eps_sigma_series):
    """Fine-error estimate from the coarse history, dropping the fine-only tail.

    Parameters
    ----------
    eps_sigma_series : sequence of (n_c,) arrays
        Coarse errors in chronological order, times ``0 .. k-1``.

    Returns
    -------
    (n_f,) ndarray
        ``sum_l W^(l+1) eps_sigma^(k-l-1)``.
    """
    series = _series(mem, eps_sigma_series, "eps_sigma_series")
    k = mem.k
    out = np.zeros(mem.Tqq.shape[0], dtype=np.complex128)
    for ell in range(k):
        out += mem.W[ell] @ series[k - ell - 1]
    return out


def reconstruct_fine_error(mem, e_sigma_series, e_phi_0):
    """Exact fine error at time k: memory interpolation plus ``S^k e_phi^(0)``."""
    e_phi_0 = np.asarray(e_phi_0, dtype=np.complex128)
    return interpolate_memory(mem, e_sigma_series) + mem.Tqq_powers[mem.k] @ e_phi_0


def noise(setup, basis, R, e_phi_0, k):
    """``eta^(k) = -R A_hat Q S^k e_phi^(0)``."""
    S = basis.Q_dual @ setup.T @ basis.Q
    v = np.asarray(e_phi_0, dtype=np.complex128)
    for _ in range(k):
        v = S @ v
    return NoiseTerm(eta=-(_R(R) @ (setup.A_hat @ (basis.Q @ v))), k=k)


def coarse_relaxation_step(mem, e_sigma_series, e_phi_0=None, basis=None, setup=None):
    """Advance the coarse error one step through the memory recursion.

    Returns ``sum_{l=0..k} T^(l) e_sigma^(k-l)`` for a chronological series
    of ``k + 1`` coarse errors. The recursion is closed only up to the
    fine-only tail ``P_dual T Q S^k e_phi^(0)``; pass `e_phi_0` together
    with `basis` and `setup` to include it.
    """
    k = mem.k
    series = [np.asarray(s, dtype=np.complex128) for s in e_sigma_series]
    if len(series) != k + 1:
        raise ValueError(f"need {k + 1} coarse errors (times 0..{k}), got {len(series)}")
    out = sum(mem.T_coarse[ell] @ series[k - ell] for ell in range(k + 1))
    if e_phi_0 is not None:
        out = out + basis.P_dual @ setup.T @ basis.Q @ (mem.Tqq_powers[k] @ e_phi_0)
    return out


def cr_diagnostics(setup, basis, k):
    """Spectral radius of ``S = Q_dual T Q`` and the 2-norm of ``S^k``."""
    S = basis.Q_dual @ setup.T @ basis.Q
    Sk = matrix_power_list(S, k)[-1]
    return {"rho": spectral_radius(S), "decay": float(np.linalg.norm(Sk, 2))}


def effective_prolongation(mem):
    """``P' = sum_{l=0..k} P^(l)``."""
    return sum(mem.P_gen[1:], mem.P_gen[0].copy())
