"""Idealized two-level cycles: Markovian, semi-Markovian, non-Markovian and exact.

A cycle is ``k`` relaxation steps followed by one coarse correction and no
post-smoothing. Every scheme comes as a cycle function and as a closed-form
error propagator ``E_TG`` mapping ``x - x^(0)`` to ``x - x_new``.
"""
from dataclasses import dataclass, field

import numpy as np

from .linalg import SingularMatrixError, matrix_power_list, solve_dense
from .memory import build_memory, effective_prolongation, noise
from .relaxation import relax, residual_shift
from .splitting import Restriction

__all__ = [
    "TwoLevelConfig",
    "CycleResult",
    "PremiseError",
    "markovian_cycle",
    "semi_markovian_cycle",
    "non_markovian_cycle",
    "exact_cycle",
    "markovian_propagator",
    "semi_markovian_propagator",
    "non_markovian_propagator",
    "probe_propagator",
    "run_cycle",
    "CYCLES",
]

RAQ_TOL = 1e-10
EXACT_EIG_TOL = 1e-10


class PremiseError(ValueError):
    """A scheme was called outside the regime its derivation assumes."""


@dataclass(frozen=True)
class TwoLevelConfig:
    scheme: str = "markovian"
    k: int = 3
    restriction_mode: str = "p_dual"

    def __post_init__(self):
        if self.scheme not in CYCLES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {tuple(CYCLES)}")
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.restriction_mode not in ("given", "p_dual", "ideal"):
            raise ValueError(f"unknown restriction mode {self.restriction_mode!r}")


@dataclass(eq=False)
class CycleResult:
    x_new: np.ndarray
    eps_sigma: np.ndarray
    E_TG: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)


def _R(R):
    return R.R if isinstance(R, Restriction) else np.asarray(R, dtype=np.complex128)


class _Run:
    """Relaxation history and the coarse quantities every scheme needs."""

    def __init__(self, setup, basis, R, b, x0, k):
        self.hist = relax(setup, b, x0, k)
        self.k = k
        self.x_k = self.hist.iterates[-1]
        self.R = _R(R)
        self.RA = self.R @ setup.A_hat
        self.r_hat_sigma = self.R @ residual_shift(setup, self.hist)
        x_sig = [basis.P_dual @ x for x in self.hist.iterates]
        # x_sigma^(k) - x_sigma^(m), m = 0..k
        self.dx_sigma = [x_sig[-1] - xs for xs in x_sig]

    def coarse_history(self, eps_k):
        """Shift relation: eps_sigma^(m) = eps_sigma^(k) + x_sigma^(k) - x_sigma^(m)."""
        return [eps_k + d for d in self.dx_sigma]


def _noise_diag(setup, basis, R, x0, x_exact, k):
    if x_exact is None:
        return {}
    e_phi_0 = basis.Q_dual @ (np.asarray(x_exact) - np.asarray(x0))
    return {"noise_norm": float(np.linalg.norm(noise(setup, basis, R, e_phi_0, k).eta))}


def markovian_propagator(setup, basis, R, k):
    """``(I - P (R A_hat P)^{-1} R A_hat) T^k``."""
    R = _R(R)
    RA = R @ setup.A_hat
    n = setup.n
    CG = np.eye(n) - basis.P @ solve_dense(RA @ basis.P, RA)
    return CG @ matrix_power_list(setup.T, k)[-1]


def semi_markovian_propagator(setup, basis, k):
    """``Q S^k Q_dual`` with ``S = Q_dual T Q``."""
    S = basis.Q_dual @ setup.T @ basis.Q
    return basis.Q @ matrix_power_list(S, k)[-1] @ basis.Q_dual


def non_markovian_propagator(setup, basis, R, k):
    """``[I - P' (R A_hat P')^{-1} R A_hat] Q S^k Q_dual``."""
    mem = build_memory(setup, basis, R, k)
    Pp = effective_prolongation(mem)
    RA = _R(R) @ setup.A_hat
    CG = np.eye(setup.n) - Pp @ solve_dense(RA @ Pp, RA)
    return CG @ basis.Q @ mem.Tqq_powers[k] @ basis.Q_dual


def markovian_cycle(setup, basis, R, b, x0, k, assemble=False, x_exact=None):
    """Petrov-Galerkin coarse solve ``R A_hat P eps = R r_hat`` and correction ``x^(k) + P eps``."""
    run = _Run(setup, basis, R, b, x0, k)
    eps = solve_dense(run.RA @ basis.P, run.r_hat_sigma)
    res = CycleResult(x_new=run.x_k + basis.P @ eps, eps_sigma=eps)
    res.diagnostics.update(_noise_diag(setup, basis, R, x0, x_exact, k))
    if assemble:
        res.E_TG = markovian_propagator(setup, basis, R, k)
    return res


def semi_markovian_cycle(setup, basis, R, b, x0, k, assemble=False, x_exact=None):
    """Exact Petrov-Galerkin coarse solve followed by memory-inclusive interpolation.

    Requires ``R A_hat Q = 0``; the remaining error is ``Q S^k Q_dual e^(0)``.

    Raises
    ------
    PremiseError
        If ``||R A_hat Q||_F > 1e-10``.
    """
    raq = float(np.linalg.norm(_R(R) @ setup.A_hat @ basis.Q))
    if raq > RAQ_TOL:
        raise PremiseError(
            f"semi-Markovian cycle needs R A_hat Q = 0, measured ||R A_hat Q|| = {raq:.3e}"
        )
    run = _Run(setup, basis, R, b, x0, k)
    mem = build_memory(setup, basis, None, k)
    eps = solve_dense(run.RA @ basis.P, run.r_hat_sigma)
    hist = run.coarse_history(eps)
    corr = sum(mem.P_gen[ell] @ hist[k - ell] for ell in range(k + 1))
    res = CycleResult(x_new=run.x_k + corr, eps_sigma=eps, diagnostics={"RAQ": raq})
    res.diagnostics.update(_noise_diag(setup, basis, R, x0, x_exact, k))
    if assemble:
        res.E_TG = semi_markovian_propagator(setup, basis, k)
    return res


def non_markovian_cycle(setup, basis, R, b, x0, k, assemble=False, x_exact=None):
    """Generalized coarse solve ``A_sigma eps = r_hat_sigma + s_sigma`` with memory interpolation."""
    run = _Run(setup, basis, R, b, x0, k)
    mem = build_memory(setup, basis, R, k)
    A_sig = sum(mem.A_sigma[1:], mem.A_sigma[0].copy())
    s = -sum(mem.A_sigma[k - m] @ run.dx_sigma[m] for m in range(k + 1))
    eps = solve_dense(A_sig, run.r_hat_sigma + s)
    hist = run.coarse_history(eps)
    corr = sum(mem.P_gen[ell] @ hist[k - ell] for ell in range(k + 1))
    res = CycleResult(x_new=run.x_k + corr, eps_sigma=eps,
                      diagnostics={"s_norm": float(np.linalg.norm(s))})
    res.diagnostics.update(_noise_diag(setup, basis, R, x0, x_exact, k))
    if assemble:
        res.E_TG = non_markovian_propagator(setup, basis, R, k)
    return res


def exact_cycle(setup, basis, R, b, x0, k, assemble=False, x_exact=None):
    """Exact two-level solve: resolves the fine-only tail through the shift relation.

    Uses dense inverses throughout; this is a reference method, not a
    practical algorithm. ``diagnostics`` records the relative mismatch of
    the coarse operator against ``R A_hat P_tilde`` and ``R_tilde A_hat P``.

    Raises
    ------
    PremiseError
        If an eigenvalue of ``S^k`` lies within 1e-10 of 1.
    """
    run = _Run(setup, basis, R, b, x0, k)
    mem = build_memory(setup, basis, None, k)
    G = mem.Tqq_powers[k]
    if G.size:
        gap = float(np.min(np.abs(np.linalg.eigvals(G) - 1.0)))
        if gap <= EXACT_EIG_TOL:
            raise PremiseError(
                f"I - S^k is singular to tolerance (eigenvalue gap {gap:.3e}); "
                "increase k or choose a different split"
            )
    I_f = np.eye(G.shape[0])
    try:
        Wt = [solve_dense(I_f - G, w) for w in mem.W]
        x_phi = [basis.Q_dual @ x for x in run.hist.iterates]
        xi = solve_dense(I_f - G, G @ (x_phi[-1] - x_phi[0]))
    except SingularMatrixError as exc:
        raise PremiseError(f"I - S^k is singular: {exc}") from exc
    RAQ = run.RA @ basis.Q
    At = [run.RA @ basis.P] + [RAQ @ w for w in Wt]
    A_tilde = sum(At[1:], At[0].copy())
    s = -sum(At[k - m] @ run.dx_sigma[m] for m in range(k + 1)) - RAQ @ xi
    e_sigma = solve_dense(A_tilde, run.r_hat_sigma + s)
    hist = run.coarse_history(e_sigma)
    e_phi = xi + sum(Wt[ell] @ hist[k - ell - 1] for ell in range(k))
    x_new = run.x_k + basis.P @ e_sigma + basis.Q @ e_phi

    # effective transfer operators
    QAQ = basis.Q_dual @ setup.A_hat @ basis.Q
    P_t = basis.P - basis.Q @ solve_dense(QAQ, basis.Q_dual @ setup.A_hat @ basis.P)
    R_t = run.R - RAQ @ solve_dense(QAQ, basis.Q_dual)
    scale = max(np.linalg.norm(A_tilde), 1e-300)
    diag = {
        "xi_norm": float(np.linalg.norm(xi)),
        "s_norm": float(np.linalg.norm(s)),
        "A_tilde_vs_RAP_tilde": float(np.linalg.norm(A_tilde - run.RA @ P_t) / scale),
        "A_tilde_vs_R_tildeAP": float(np.linalg.norm(A_tilde - R_t @ setup.A_hat @ basis.P) / scale),
    }
    res = CycleResult(x_new=x_new, eps_sigma=e_sigma, diagnostics=diag)
    res.diagnostics.update(_noise_diag(setup, basis, R, x0, x_exact, k))
    if assemble:
        res.E_TG = probe_propagator(exact_cycle, setup, basis, R, k)
    return res


def probe_propagator(cycle, setup, basis, R, k):
    """Assemble ``E_TG`` column by column by running `cycle` on ``A x = 0``.

    With ``b = 0`` the exact solution is 0, so starting from ``x0 = -e_j``
    the post-cycle error ``-x_new`` is column ``j`` of ``E_TG``.
    """
    n = setup.n
    b = np.zeros(n, dtype=np.complex128)
    E = np.empty((n, n), dtype=np.complex128)
    for j in range(n):
        x0 = np.zeros(n, dtype=np.complex128)
        x0[j] = -1.0
        E[:, j] = -cycle(setup, basis, R, b, x0, k).x_new
    return E


CYCLES = {
    "markovian": markovian_cycle,
    "semi_markovian": semi_markovian_cycle,
    "non_markovian": non_markovian_cycle,
    "exact": exact_cycle,
}


def run_cycle(config, setup, basis, b, x0, R=None, split=None, **kwargs):
    """Dispatch one cycle according to a :class:`TwoLevelConfig`."""
    if config.restriction_mode == "p_dual":
        R = basis.P_dual
    elif config.restriction_mode == "ideal":
        from .transfer_flow import ideal_restriction
        if split is None:
            raise ValueError("ideal restriction needs the coarse/fine split")
        R = ideal_restriction(setup, split)
    elif R is None:
        raise ValueError("restriction_mode 'given' needs an explicit R")
    return CYCLES[config.scheme](setup, basis, R, b, x0, config.k, **kwargs)
