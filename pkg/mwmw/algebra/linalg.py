"""Dense and sparse matrix primitives.

Hermitian matrix functions go through ``numpy.linalg.eigh``; large sparse
norms through ARPACK (``scipy.sparse.linalg.eigsh`` / ``svds``) with a
certified bracket.
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple, Union

from pydantic import BaseModel, Field
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, svds
import numpy as np

from mwmw.configs.settings import app_config


Matrix = Union[np.ndarray, sparse.spmatrix, sparse.sparray]


def _as_dense(M: Matrix) -> np.ndarray:
    if sparse.issparse(M):
        return M.toarray()
    return np.asarray(M)


def _check_square(M: Matrix) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")


def hermiticity_defect(M: Matrix) -> float:
    """Largest entrywise ``|M - M†|``."""
    if sparse.issparse(M):
        diff = M - M.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0
    M = np.asarray(M)
    return float(np.max(np.abs(M - M.conj().T))) if M.size else 0.0


def is_hermitian(M: Matrix, tol: Optional[float] = None) -> bool:
    """Entrywise self-adjointness test relative to the largest entry."""
    tol = app_config.HERMITIAN_TOL if tol is None else tol
    if sparse.issparse(M):
        scale = float(abs(M).max()) if M.nnz else 0.0
    else:
        scale = float(np.max(np.abs(M))) if np.size(M) else 0.0
    return hermiticity_defect(M) <= tol * max(1.0, scale)


def _require_hermitian(M: Matrix, what: str = "matrix") -> None:
    if not is_hermitian(M):
        raise ValueError(f"{what} is not Hermitian (defect {hermiticity_defect(M):.3e})")


def op_norm(M: Matrix) -> float:
    """Operator (spectral) norm of a square matrix.

    Hermitian inputs use ``eigvalsh``; everything else the largest singular
    value. Sparse inputs are forwarded to :func:`op_norm_sparse`.

    Examples
    --------
    >>> op_norm(np.diag([3, -4j]))
    4.0
    """
    if sparse.issparse(M):
        return op_norm_sparse(M).value
    M = np.asarray(M)
    _check_square(M)
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if M.size == 0:
        return 0.0
    if is_hermitian(M):
        return float(np.max(np.abs(np.linalg.eigvalsh(M))))
    return float(np.linalg.norm(M, 2))


class NormEstimate(BaseModel):
    """Iterative norm with a certified two-sided bracket ``lower ≤ ‖M‖ ≤ upper``."""

    value: float = Field(description="Best estimate of the norm.")
    lower: float = Field(description="‖Mv‖ for the returned unit vector v.")
    upper: float = Field(description="sqrt(‖M‖_1 ‖M‖_inf).")
    method: str = Field(description="Solver used.")
    converged: bool = True


def op_norm_sparse(M: Matrix, hermitian: Optional[bool] = None, tol: Optional[float] = None) -> NormEstimate:
    """Spectral norm of a large sparse matrix via ARPACK.

    Parameters
    ----------
    M : scipy.sparse matrix
        Square operator.
    hermitian : bool | None
        Use ``eigsh`` when true, ``svds`` otherwise; detected when ``None``.
    tol : float | None
        Solver tolerance, defaults to ``NORM_TOL``.

    Returns
    -------
    NormEstimate
        Value with certified lower and upper bounds.
    """
    M = sparse.csr_matrix(M)
    _check_square(M)
    tol = app_config.NORM_TOL if tol is None else tol
    if M.nnz == 0:
        return NormEstimate(value=0.0, lower=0.0, upper=0.0, method="zero")
    if not np.all(np.isfinite(M.data)):
        raise ValueError("matrix has non-finite entries")
    absM = abs(M)
    upper = float(np.sqrt(absM.sum(axis=0).max() * absM.sum(axis=1).max()))
    if M.shape[0] <= 64:
        value = op_norm(M.toarray())
        return NormEstimate(value=value, lower=value, upper=value, method="dense")
    if hermitian is None:
        hermitian = is_hermitian(M)

    # fixed start vector keeps reruns bit-identical
    v0 = np.random.default_rng(0).normal(size=M.shape[0]).astype(M.dtype)
    converged = True
    try:
        if hermitian:
            vals, vecs = eigsh(M, k=1, which="LM", tol=tol, maxiter=20 * M.shape[0], v0=v0)
            estimate = float(np.abs(vals[0]))
        else:
            _, svals, vh = svds(M, k=1, tol=tol, v0=v0)
            vecs = vh.conj().T
            estimate = float(svals[0])
    except ArpackNoConvergence as exc:
        logging.warning("ARPACK did not converge; using partial result")
        converged = False
        if exc.eigenvalues is None or len(exc.eigenvalues) == 0:
            return NormEstimate(value=upper, lower=0.0, upper=upper, method="bound-only", converged=False)
        vals, vecs = exc.eigenvalues, exc.eigenvectors
        estimate = float(np.max(np.abs(vals)))
    v = vecs[:, 0]
    lower = float(np.linalg.norm(M @ v) / np.linalg.norm(v))
    value = min(max(estimate, lower), upper)
    return NormEstimate(
        value=value, lower=lower, upper=upper, method="eigsh" if hermitian else "svds", converged=converged
    )


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``[A, B] = AB - BA``."""
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return A @ B - B @ A


def unitarity_defect(U: np.ndarray) -> float:
    """Largest entrywise ``|U U† - I|``; 1-D input is read as a diagonal."""
    U = np.asarray(U)
    if U.ndim == 1:
        return float(np.max(np.abs(np.abs(U) - 1.0))) if U.size else 0.0
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def conjugate_unitary(U: np.ndarray, A: np.ndarray, check: bool = True) -> np.ndarray:
    """Return ``U A U†``.

    ``U`` may be a full matrix or the 1-D diagonal of a diagonal unitary.
    """
    U = np.asarray(U)
    dim = U.shape[0]
    if A.shape != (dim, dim):
        raise ValueError(f"dimension mismatch: unitary {dim} vs operator {A.shape}")
    if check and unitarity_defect(U) > app_config.UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (defect {unitarity_defect(U):.3e})")
    if U.ndim == 1:
        return (U[:, None] * A) * U.conj()[None, :]
    return U @ A @ U.conj().T


def is_diagonal(M: Matrix) -> bool:
    if sparse.issparse(M):
        coo = sparse.coo_matrix(M)
        return bool(np.all(coo.row == coo.col) or coo.nnz == 0)
    M = np.asarray(M)
    return bool(np.count_nonzero(M - np.diag(np.diagonal(M))) == 0)


def hermitian_eig(H: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix after the hermiticity check."""
    H = np.asarray(H)
    _check_square(H)
    _require_hermitian(H)
    return np.linalg.eigh(H)


def hermitian_exp(H: np.ndarray, scale: complex) -> np.ndarray:
    """``exp(scale · H)`` for Hermitian ``H`` via eigendecomposition.

    Diagonal inputs are exponentiated entrywise.

    Examples
    --------
    >>> np.allclose(hermitian_exp(np.zeros((2, 2)), 1j), np.eye(2))
    True
    """
    H = np.asarray(H)
    _check_square(H)
    _require_hermitian(H)
    if is_diagonal(H):
        return np.diag(np.exp(scale * np.real(np.diagonal(H))))
    w, V = np.linalg.eigh(H)
    return (V * np.exp(scale * w)[None, :]) @ V.conj().T


def matrix_log_psd(rho: np.ndarray, floor: Optional[float] = None) -> np.ndarray:
    """Matrix logarithm of a positive semidefinite matrix.

    Eigenvalues below ``floor`` (default ``LOG_FLOOR``) are clamped before the
    logarithm. Support mismatches are detected by
    :func:`mwmw.thermal.relative_entropy`, not here.

    Raises
    ------
    ValueError
        If an eigenvalue is below ``-1e-10 · ‖ρ‖``.
    """
    floor = app_config.LOG_FLOOR if floor is None else floor
    w, V = hermitian_eig(rho)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -1e-10 * scale:
        raise ValueError(f"matrix is not positive semidefinite (eigenvalue {w[0]:.3e})")
    logw = np.log(np.maximum(w, floor))
    return (V * logw[None, :]) @ V.conj().T
