"""Coarse/fine partitions, transfer bases with duals, and restriction helpers."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .linalg import as_matrix

__all__ = [
    "CFSplit",
    "TransferBasis",
    "Restriction",
    "every_nth",
    "every_other",
    "red_black",
    "explicit_split",
    "canonical_basis",
    "basis_from_columns",
    "random_basis",
    "check_orthogonality_RAQ",
]


@dataclass(frozen=True, eq=False)
class CFSplit:
    """Partition of ``range(n)`` into coarse and fine index sets (0-based, sorted)."""

    n: int
    coarse: np.ndarray
    fine: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coarse, dtype=int)
        f = np.asarray(self.fine, dtype=int)
        if c.size == 0 or f.size == 0:
            raise ValueError("coarse and fine sets must both be nonempty")
        if np.intersect1d(c, f).size:
            raise ValueError("coarse and fine sets overlap")
        if not np.array_equal(np.union1d(c, f), np.arange(self.n)):
            raise ValueError(f"coarse and fine sets do not cover range({self.n})")
        object.__setattr__(self, "coarse", np.sort(c))
        object.__setattr__(self, "fine", np.sort(f))

    @property
    def n_c(self):
        return self.coarse.size

    @property
    def n_f(self):
        return self.fine.size

    @property
    def perm(self):
        """Coarse-first ordering of ``range(n)``."""
        return np.concatenate([self.coarse, self.fine])


def explicit_split(n, coarse):
    raw = np.asarray(coarse, dtype=int).reshape(-1)
    coarse = np.unique(raw)
    if coarse.size != raw.size:
        raise ValueError("coarse indices contain duplicates")
    if coarse.size and (coarse.min() < 0 or coarse.max() >= n):
        raise ValueError(f"coarse indices must lie in range({n})")
    return CFSplit(n, coarse, np.setdiff1d(np.arange(n), coarse))


def every_nth(n, stride, offset=None):
    """1D coarsening keeping every `stride`-th point, starting at `offset` (default ``stride - 1``)."""
    offset = stride - 1 if offset is None else offset
    return explicit_split(n, np.arange(offset, n, stride))


def every_other(n):
    return every_nth(n, 2)


def red_black(nx, ny):
    """Checkerboard split of an ``nx`` by ``ny`` grid, point (i, j) stored at ``j * nx + i``."""
    i, j = np.meshgrid(np.arange(nx), np.arange(ny))
    mask = ((i + j) % 2 == 1).reshape(-1)
    return explicit_split(nx * ny, np.flatnonzero(mask))


@dataclass(frozen=True, eq=False)
class TransferBasis:
    """Prolongations `P`, `Q` and their duals.

    Invariants: ``P_dual P = I``, ``Q_dual Q = I``, ``Q_dual P = 0``,
    ``P_dual Q = 0`` and ``P P_dual + Q Q_dual = I``.
    """

    P: np.ndarray
    Q: np.ndarray
    P_dual: np.ndarray
    Q_dual: np.ndarray

    def __post_init__(self):
        for name in ("P", "Q", "P_dual", "Q_dual"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.complex128))
        n, n_c = self.P.shape
        n_f = self.Q.shape[1]
        expected = {"Q": (n, n_f), "P_dual": (n_c, n), "Q_dual": (n_f, n)}
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise ValueError(f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if n_c + n_f != n:
            raise ValueError(f"n_c + n_f = {n_c + n_f} does not match n = {n}")

    @property
    def n(self):
        return self.P.shape[0]

    @property
    def n_c(self):
        return self.P.shape[1]

    @property
    def n_f(self):
        return self.Q.shape[1]

    def residuals(self):
        """Frobenius norms of the five basis identities."""
        I_c = np.eye(self.n_c)
        I_f = np.eye(self.n_f)
        return {
            "PdP": np.linalg.norm(self.P_dual @ self.P - I_c),
            "QdQ": np.linalg.norm(self.Q_dual @ self.Q - I_f),
            "QdP": np.linalg.norm(self.Q_dual @ self.P),
            "PdQ": np.linalg.norm(self.P_dual @ self.Q),
            "complete": np.linalg.norm(
                self.P @ self.P_dual + self.Q @ self.Q_dual - np.eye(self.n)
            ),
        }

    def max_residual(self):
        return max(self.residuals().values())


@dataclass(frozen=True, eq=False)
class Restriction:
    """Restriction `R` and, when M is known, the standard-form ``R_hat = R M``."""

    R: np.ndarray
    R_hat: np.ndarray = None

    def __post_init__(self):
        R = as_matrix(self.R)
        sv = np.linalg.svd(R, compute_uv=False)
        if R.shape[0] > R.shape[1] or sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise ValueError(f"restriction {R.shape} is not of full row rank")
        object.__setattr__(self, "R", R)

    @classmethod
    def from_setup(cls, R, setup):
        R = as_matrix(R)
        return cls(R, R @ setup.M)


def canonical_basis(split):
    """Identity selections: ``P = I[:, coarse]``, ``Q = I[:, fine]``, duals are transposes."""
    I = np.eye(split.n, dtype=np.complex128)
    P = I[:, split.coarse]
    Q = I[:, split.fine]
    return TransferBasis(P, Q, P.T.copy(), Q.T.copy())


def _kernel_basis(P_dual):
    """Orthonormal basis of ker(P_dual) drawn from the columns of its projector."""
    n = P_dual.shape[1]
    n_f = n - P_dual.shape[0]
    K = np.eye(n) - np.linalg.pinv(P_dual) @ P_dual
    _, _, piv = sla.qr(K, pivoting=True, mode="economic")
    cols = np.sort(piv[:n_f])
    Qf, Rf = np.linalg.qr(K[:, cols])
    phase = np.diag(Rf) / np.abs(np.diag(Rf))
    return Qf * phase[None, :]


def basis_from_columns(P, P_dual, tol=1e-10):
    """Complete ``(P, P_dual)`` to a full transfer basis.

    `Q` is an orthonormal basis of ``ker(P_dual)``; `Q_dual` is then forced
    by duality, as the trailing rows of ``[P Q]^{-1}``.

    Raises
    ------
    ValueError
        If ``P_dual P != I`` or ``[P Q]`` is numerically singular.
    """
    P = as_matrix(P)
    P_dual = as_matrix(P_dual)
    n, n_c = P.shape
    if P_dual.shape != (n_c, n):
        raise ValueError(f"P_dual has shape {P_dual.shape}, expected {(n_c, n)}")
    if np.linalg.norm(P_dual @ P - np.eye(n_c)) > tol:
        raise ValueError("P_dual P != I; columns and duals are not biorthogonal")
    Q = _kernel_basis(P_dual)
    G = np.hstack([P, Q])
    sv = np.linalg.svd(G, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise ValueError("P is rank deficient; cannot complete the basis")
    G_inv = np.linalg.inv(G)
    return TransferBasis(P, Q, P_dual, G_inv[n_c:])


def random_basis(n, n_c, rng, spread=0.3, max_cond=100.0):
    """Random well-conditioned basis: ``G = I + spread * N(0, 1)``, ``P, Q`` its column blocks.

    Draws are repeated until ``cond(G) <= max_cond``.
    """
    while True:
        G = np.eye(n) + spread * rng.standard_normal((n, n))
        if np.linalg.cond(G) <= max_cond:
            break
    G = G.astype(np.complex128)
    G_inv = np.linalg.inv(G)
    return TransferBasis(G[:, :n_c], G[:, n_c:], G_inv[:n_c], G_inv[n_c:])


def check_orthogonality_RAQ(R, setup, basis):
    """Frobenius norm of ``R A_hat Q``; zero certifies the semi-Markovian premise."""
    R = R.R if isinstance(R, Restriction) else R
    return float(np.linalg.norm(R @ setup.A_hat @ basis.Q))
