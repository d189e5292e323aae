"""Stationary relaxation: preconditioner M, relaxation operator MA, propagator I - MA."""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .linalg import as_matrix, as_vector

__all__ = [
    "RelaxationSetup",
    "RelaxationHistory",
    "build_setup",
    "relax",
    "residual_shift",
    "error_shift",
    "SCHEMES",
]

SCHEMES = ("richardson", "jacobi", "gauss_seidel_forward", "custom")


@dataclass(frozen=True, eq=False)
class RelaxationSetup:
    """System matrix `A`, preconditioner `M`, ``A_hat = M A`` and ``T = I - A_hat``.

    `T` is built from `A_hat` once, so ``T + A_hat == I`` holds exactly.
    """

    A: np.ndarray
    M: np.ndarray
    A_hat: np.ndarray
    T: np.ndarray
    scheme: str
    params: dict = field(default_factory=dict)
    M_invertible: bool = True

    @property
    def n(self):
        return self.A.shape[0]

    def apply_M(self, r):
        """Apply M without the dense matrix where the scheme allows it."""
        if self.scheme == "gauss_seidel_forward":
            L = np.tril(self.A)
            return sla.solve_triangular(L, r, lower=True)
        if self.scheme == "jacobi":
            return self.params["omega"] * r / np.diag(self.A)
        if self.scheme == "richardson":
            return self.params["omega"] * r
        return self.M @ r


@dataclass(frozen=True, eq=False)
class RelaxationHistory:
    """Iterates ``x^(0), ..., x^(k)`` of a relaxation run with right-hand side `b`."""

    b: np.ndarray
    iterates: list

    @property
    def k(self):
        return len(self.iterates) - 1

    def stacked(self):
        """Iterates as a ``(k + 1, n)`` array."""
        return np.array(self.iterates)


def build_setup(A, scheme="jacobi", omega=None, M=None):
    """Build a relaxation setup.

    Parameters
    ----------
    A : (n, n) array_like or sparse matrix
    scheme : {'richardson', 'jacobi', 'gauss_seidel_forward', 'custom'}
    omega : float, optional
        Damping for richardson (default 1) and jacobi (default 2/3).
    M : (n, n) array_like, optional
        Preconditioner for the ``custom`` scheme.

    Returns
    -------
    RelaxationSetup
    """
    A = as_matrix(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"A must be square, got {A.shape}")
    params = {}
    if scheme == "richardson":
        omega = 1.0 if omega is None else omega
        params["omega"] = omega
        Mmat = omega * np.eye(n, dtype=np.complex128)
    elif scheme == "jacobi":
        omega = 2.0 / 3.0 if omega is None else omega
        params["omega"] = omega
        d = np.diag(A)
        zero = np.flatnonzero(d == 0)
        if zero.size:
            raise ValueError(f"jacobi needs a nonzero diagonal; A[{zero[0]}, {zero[0]}] == 0")
        Mmat = np.diag(omega / d)
    elif scheme == "gauss_seidel_forward":
        d = np.diag(A)
        zero = np.flatnonzero(d == 0)
        if zero.size:
            raise ValueError(
                f"gauss_seidel_forward needs an invertible lower triangle; "
                f"A[{zero[0]}, {zero[0]}] == 0"
            )
        Mmat = sla.solve_triangular(np.tril(A), np.eye(n), lower=True)
    elif scheme == "custom":
        if M is None:
            raise ValueError("custom scheme needs an explicit M")
        Mmat = as_matrix(M)
        if Mmat.shape != (n, n):
            raise ValueError(f"M has shape {Mmat.shape}, expected {(n, n)}")
    else:
        raise ValueError(f"unknown relaxation scheme {scheme!r}; expected one of {SCHEMES}")

    A_hat = Mmat @ A
    T = np.eye(n, dtype=np.complex128) - A_hat
    sv = np.linalg.svd(Mmat, compute_uv=False)
    invertible = bool(sv[-1] > 1e-14 * sv[0]) if sv[0] > 0 else False
    return RelaxationSetup(A=A, M=Mmat, A_hat=A_hat, T=T, scheme=scheme,
                           params=params, M_invertible=invertible)


def relax(setup, b, x0, k):
    """Run `k` steps of ``x <- x + M (b - A x)`` and keep every iterate."""
    b = as_vector(b)
    x = as_vector(x0)
    if b.shape[0] != setup.n or x.shape[0] != setup.n:
        raise ValueError(f"dimension mismatch: n={setup.n}, len(b)={b.shape[0]}, len(x0)={x.shape[0]}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    iterates = [x]
    for _ in range(k):
        x = x + setup.M @ (b - setup.A @ x)
        iterates.append(x)
    return RelaxationHistory(b=b, iterates=iterates)


def residual_shift(setup, history):
    """Preconditioned residual ``x^(k+1) - x^(k) = M (b - A x^(k))`` (one lookahead step)."""
    x = history.iterates[-1]
    return setup.M @ (history.b - setup.A @ x)


def error_shift(history, ell, k=None, select=None):
    """Return ``x^(k) - x^(ell)``, so that ``e^(ell) = e^(k) + shift``.

    `select` is an optional index array or a ``(m, n)`` dual operator
    (e.g. ``P_dual``) applied to the difference.
    """
    k = history.k if k is None else k
    if not 0 <= ell <= k <= history.k:
        raise IndexError(f"need 0 <= ell <= k <= {history.k}, got ell={ell}, k={k}")
    d = history.iterates[k] - history.iterates[ell]
    if select is None:
        return d
    select = np.asarray(select)
    if select.ndim == 2:
        return select @ d
    return d[select]
