"""Transfer operators derived from relaxation: ideal, flowed and optimal."""
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import eig_dense, solve_dense
from .splitting import TransferBasis, basis_from_columns

__all__ = [
    "FlowState",
    "FlowDivergenceError",
    "SpectralTransfer",
    "SpectralCutError",
    "ideal_weights",
    "ideal_prolongation",
    "ideal_restriction",
    "standard_ideal_restriction",
    "ideal_basis",
    "flow_init",
    "flow_step",
    "infinite_k_flow_step",
    "flow_run",
    "column_energies",
    "optimal_transfers",
]


def _blocks(M, split):
    c, f = split.coarse, split.fine
    return M[np.ix_(c, c)], M[np.ix_(c, f)], M[np.ix_(f, c)], M[np.ix_(f, f)]


def ideal_weights(setup, split, k=None):
    """Interpolation weights ``W = sum_{l<k} T_ff^l T_fc``.

    ``k=None`` gives the limit ``-A_hat_ff^{-1} A_hat_fc``.
    """
    if k is None:
        _, _, Afc, Aff = _blocks(setup.A_hat, split)
        return -solve_dense(Aff, Afc)
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    _, _, Tfc, Tff = _blocks(setup.T, split)
    W = Tfc.copy()
    for _ in range(k - 1):
        W = Tfc + Tff @ W
    return W


def _assemble_P(split, W):
    P = np.zeros((split.n, split.n_c), dtype=np.complex128)
    P[split.coarse, np.arange(split.n_c)] = 1.0
    P[split.fine] = W
    return P


def ideal_prolongation(setup, split, k=None):
    """Prolongation with identity on coarse rows and :func:`ideal_weights` on fine rows."""
    return _assemble_P(split, ideal_weights(setup, split, k))


def ideal_restriction(setup, split):
    """``R = [I, -A_hat_cf A_hat_ff^{-1}]`` (columns in the original ordering).

    Satisfies ``R A_hat Q = 0`` for the fine injection `Q`.
    """
    _, Acf, _, Aff = _blocks(setup.A_hat, split)
    R = np.zeros((split.n_c, split.n), dtype=np.complex128)
    R[np.arange(split.n_c), split.coarse] = 1.0
    R[:, split.fine] = -solve_dense(Aff.T, Acf.T).T
    return R


def standard_ideal_restriction(A, split):
    """``[I, -A_cf A_ff^{-1}]`` built from the system matrix itself."""
    A = np.asarray(A, dtype=np.complex128)
    _, Acf, _, Aff = _blocks(A, split)
    R = np.zeros((split.n_c, split.n), dtype=np.complex128)
    R[np.arange(split.n_c), split.coarse] = 1.0
    R[:, split.fine] = -solve_dense(Aff.T, Acf.T).T
    return R


def ideal_basis(setup, split, k=None):
    """Basis with ideal `P`, coarse injection dual, fine injection `Q` and ``Q_dual = [-W, I]``."""
    W = ideal_weights(setup, split, k)
    P = _assemble_P(split, W)
    I = np.eye(split.n, dtype=np.complex128)
    Q = I[:, split.fine]
    Q_dual = np.zeros((split.n_f, split.n), dtype=np.complex128)
    Q_dual[:, split.coarse] = -W
    Q_dual[np.arange(split.n_f), split.fine] = 1.0
    return TransferBasis(P, Q, I[split.coarse], Q_dual)


class FlowDivergenceError(RuntimeError):
    def __init__(self, msg, residuals):
        self.residuals = residuals
        super().__init__(msg)


@dataclass(frozen=True, eq=False)
class FlowState:
    """Prolongation ``P_tau`` under the flow with stationary dual ``P_dual``.

    ``ker(P_dual)`` does not move, so `Q` stays fixed; only ``Q_dual`` is
    updated, to ``Q0_dual (I - P_tau P_dual)``.
    """

    tau: int
    P: np.ndarray
    P_dual: np.ndarray
    Q: np.ndarray
    Q_dual: np.ndarray
    Q0_dual: np.ndarray
    energies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)

    @property
    def basis(self):
        return TransferBasis(self.P, self.Q, self.P_dual, self.Q_dual)

    def fixed_point_residual(self, setup):
        """``||Q_dual T P||_F``; zero at a fixed point of the flow."""
        return float(np.linalg.norm(self.Q_dual @ setup.T @ self.P))


def column_energies(P, A_hat):
    """``p^H A_hat p`` for each column (real part)."""
    return np.real(np.einsum("ij,ij->j", P.conj(), A_hat @ P))


def _advance(state, P_new, setup):
    n = P_new.shape[0]
    Q_dual = state.Q0_dual @ (np.eye(n) - P_new @ state.P_dual)
    new = replace(state, tau=state.tau + 1, P=P_new, Q_dual=Q_dual,
                  energies=state.energies + [column_energies(P_new, setup.A_hat)],
                  residuals=list(state.residuals))
    new.residuals.append(new.fixed_point_residual(setup))
    return new


def flow_init(P0, P0_dual, setup):
    basis = basis_from_columns(P0, P0_dual)
    state = FlowState(tau=0, P=basis.P, P_dual=basis.P_dual, Q=basis.Q,
                      Q_dual=basis.Q_dual, Q0_dual=basis.Q_dual,
                      energies=[column_energies(basis.P, setup.A_hat)])
    state.residuals.append(state.fixed_point_residual(setup))
    return state


def flow_step(state, setup, k):
    """``P <- sum_{l=0..k} (Qp T)^l P`` with the projector ``Qp = I - P P_dual``."""
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    n = state.P.shape[0]
    Qp = np.eye(n) - state.P @ state.P_dual
    V = state.P
    acc = state.P.copy()
    for _ in range(k):
        V = Qp @ (setup.T @ V)
        acc = acc + V
    return _advance(state, acc, setup)


def infinite_k_flow_step(state, setup, orthonormal=False):
    """``P <- P - Q (Q_dual A_hat Q)^{-1} Q_dual A_hat P``.

    With ``orthonormal=True`` the projection uses an orthonormal basis of
    ``col(Q)`` and its conjugate transpose as dual; for Hermitian ``A_hat``
    the step is then an ``A_hat``-orthogonal projection and column energies
    cannot increase.
    """
    if orthonormal:
        Q, _ = np.linalg.qr(state.Q)
        Qd = Q.conj().T
    else:
        Q, Qd = state.Q, state.Q_dual
    QA = Qd @ setup.A_hat
    P_new = state.P - Q @ solve_dense(QA @ Q, QA @ state.P)
    return _advance(state, P_new, setup)


def flow_run(P0, P0_dual, setup, k=3, max_tau=500, tol=1e-10, infinite_k=False):
    """Iterate the flow until ``||Q_dual T P|| <= tol`` or `max_tau` steps.

    Raises
    ------
    FlowDivergenceError
        If the fixed-point residual grows beyond 10x its starting value.
    """
    state = flow_init(P0, P0_dual, setup)
    r0 = state.residuals[0]
    while state.residuals[-1] > tol and state.tau < max_tau:
        state = infinite_k_flow_step(state, setup) if infinite_k else flow_step(state, setup, k)
        if state.residuals[-1] > 10.0 * r0:
            raise FlowDivergenceError(
                f"flow diverged at tau={state.tau}: residual {state.residuals[-1]:.3e} "
                f"vs initial {r0:.3e}", state.residuals)
    return state


class SpectralCutError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SpectralTransfer:
    """Transfers from the eigendecomposition of `T` (normalizations fixed to identity)."""

    Lambda_c: np.ndarray
    Lambda_f: np.ndarray
    V_R_c: np.ndarray
    V_R_f: np.ndarray
    V_L_c: np.ndarray
    V_L_f: np.ndarray

    @property
    def P_inf(self):
        return self.V_R_c

    @property
    def P_inf_dual(self):
        return self.V_L_c

    @property
    def Q_inf(self):
        return self.V_R_f

    @property
    def Q_inf_dual(self):
        return self.V_L_f

    @property
    def R_inf(self):
        return self.V_L_c

    @property
    def basis(self):
        return TransferBasis(self.V_R_c, self.V_R_f, self.V_L_c, self.V_L_f)

    def propagator(self, k):
        """``V_R_f Lambda_f^k V_L_f``."""
        return (self.V_R_f * self.Lambda_f**k) @ self.V_L_f


def optimal_transfers(setup, n_c, gap_tol=1e-10):
    """Coarse space of the `n_c` largest-magnitude eigenpairs of `T`.

    Raises
    ------
    SpectralCutError
        If ``|lambda_{n_c}|`` and ``|lambda_{n_c+1}|`` are not separated by `gap_tol`.
    """
    n = setup.n
    if not 0 < n_c < n:
        raise ValueError(f"need 0 < n_c < {n}, got {n_c}")
    lam, V_R, V_L = eig_dense(setup.T)
    mag = np.abs(lam)
    if mag[n_c - 1] <= mag[n_c] + gap_tol:
        raise SpectralCutError(
            f"no spectral gap at the cut: |lambda_{n_c}| = {mag[n_c - 1]:.6g}, "
            f"|lambda_{n_c + 1}| = {mag[n_c]:.6g}"
        )
    return SpectralTransfer(lam[:n_c], lam[n_c:], V_R[:, :n_c], V_R[:, n_c:],
                            V_L[:n_c], V_L[n_c:])
