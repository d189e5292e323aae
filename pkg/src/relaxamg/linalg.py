"""Dense and sparse kernels shared by every other module.

Everything is carried in complex double precision; real inputs are
promoted on entry.
"""
import warnings

import numpy as np
import scipy.linalg as sla
from scipy import sparse

__all__ = [
    "SingularMatrixError",
    "DefectiveMatrixError",
    "as_matrix",
    "as_vector",
    "as_sparse",
    "matmul",
    "solve_dense",
    "inv_dense",
    "eig_dense",
    "spectral_radius",
    "matrix_power_list",
]

PIVOT_RTOL = 1e-14
EIG_TOL = 1e-8


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when an LU pivot falls below the relative singularity tolerance."""

    def __init__(self, index, pivot, scale):
        self.index = index
        self.pivot = pivot
        super().__init__(
            f"matrix is singular to tolerance: pivot {index} has magnitude "
            f"{abs(pivot):.3e} (threshold {PIVOT_RTOL * scale:.3e})"
        )


class DefectiveMatrixError(np.linalg.LinAlgError):
    """Raised when the eigenvector matrix cannot be biorthogonally normalized."""


def as_matrix(A):
    """Return `A` as a finite complex 2D ndarray (sparse inputs are densified)."""
    if sparse.issparse(A):
        A = A.toarray()
    A = np.array(A, dtype=np.complex128, copy=True)
    if A.ndim == 1:
        A = A.reshape(-1, 1)
    if A.ndim != 2:
        raise ValueError(f"expected a 2D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def as_vector(v):
    v = np.array(v, dtype=np.complex128, copy=True).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def as_sparse(A):
    """Canonical CSR: sorted column indices, no duplicates, no stored zeros."""
    A = sparse.csr_matrix(A, dtype=np.complex128)
    A.sum_duplicates()
    A.eliminate_zeros()
    A.sort_indices()
    return A


def matmul(A, B):
    """Dense product with a shape check that reports both operands."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape[-1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    return np.asarray(A, dtype=np.complex128) @ np.asarray(B, dtype=np.complex128)


def _lu(A):
    A = as_matrix(A)
    n, m = A.shape
    if n != m:
        raise ValueError(f"matrix must be square, got {A.shape}")
    scale = np.linalg.norm(A, ord=np.inf)
    with warnings.catch_warnings():
        # exact-zero pivots are reported below with our own tolerance
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    pivots = np.diag(lu)
    small = np.flatnonzero(np.abs(pivots) <= PIVOT_RTOL * scale)
    if scale == 0.0 or small.size:
        idx = int(small[0]) if small.size else 0
        raise SingularMatrixError(idx, pivots[idx], scale)
    return lu, piv


def solve_dense(A, B):
    """Solve ``A X = B`` by partial-pivoting LU.

    Raises
    ------
    SingularMatrixError
        If a pivot has magnitude below ``1e-14 * ||A||_inf``.
    """
    lu, piv = _lu(A)
    B = np.asarray(B, dtype=np.complex128)
    if B.shape[0] != lu.shape[0]:
        raise ValueError(f"dimension mismatch: {lu.shape} \\ {B.shape}")
    return sla.lu_solve((lu, piv), B, check_finite=False)


def inv_dense(A):
    A = as_matrix(A)
    return solve_dense(A, np.eye(A.shape[0], dtype=np.complex128))


def eig_dense(A):
    """Eigendecomposition with biorthogonal left and right eigenvectors.

    Parameters
    ----------
    A : (n, n) array_like

    Returns
    -------
    lam : (n,) ndarray
        Eigenvalues sorted by decreasing magnitude.
    V_R : (n, n) ndarray
        Right eigenvectors as columns, ``A V_R = V_R diag(lam)``.
    V_L : (n, n) ndarray
        Left eigenvectors as rows, ``V_L A = diag(lam) V_L`` and
        ``V_L V_R = I``.

    Raises
    ------
    DefectiveMatrixError
        If `A` is not diagonalizable to tolerance.
    """
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got {A.shape}")
    lam, V_R = np.linalg.eig(A)
    # stable sort keeps LAPACK order among equal magnitudes
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    V_R = V_R[:, order]
    V_R = V_R / np.linalg.norm(V_R, axis=0)
    if np.linalg.cond(V_R) > 1.0 / EIG_TOL:
        raise DefectiveMatrixError(
            f"eigenvector matrix has condition {np.linalg.cond(V_R):.3e}; "
            "matrix is defective to tolerance"
        )
    V_L = np.linalg.inv(V_R)
    scale = max(np.linalg.norm(A, 2), 1.0)
    if (np.linalg.norm(A @ V_R - V_R * lam) > EIG_TOL * scale
            or np.linalg.norm(V_L @ V_R - np.eye(A.shape[0])) > EIG_TOL):
        raise DefectiveMatrixError("eigendecomposition failed residual check")
    return lam, V_R, V_L


def spectral_radius(A):
    A = as_matrix(A)
    if A.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def matrix_power_list(A, k):
    """Return ``[I, A, A^2, ..., A^k]`` by repeated multiplication."""
    A = np.asarray(A, dtype=np.complex128)
    out = [np.eye(A.shape[0], dtype=np.complex128)]
    for _ in range(k):
        out.append(out[-1] @ A)
    return out
