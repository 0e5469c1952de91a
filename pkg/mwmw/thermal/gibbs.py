"""Finite-volume Hamiltonians, Gibbs states and the KMS condition."""

from __future__ import annotations

import logging
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse
from scipy.special import logsumexp
import numpy as np

from mwmw.algebra.linalg import hermitian_eig, is_hermitian, op_norm
from mwmw.algebra.operators import Volume, local_sum
from mwmw.errors import PreconditionError, SupportError
from mwmw.model.interaction import Interaction


# Above this value of β·(spread of H) the KMS sums switch to the log domain.
KMS_LOG_DOMAIN = 100.0
_LOG_FLOAT_MAX = float(np.log(np.finfo(float).max))


class LogSpectrum(BaseModel):
    """Positive operator ``Σ_j exp(l_j) |v_j⟩⟨v_j|``; ``l_j = -inf`` marks the kernel."""

    log_values: np.ndarray
    vectors: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @classmethod
    def from_matrix(cls, M: np.ndarray, what: str = "matrix") -> "LogSpectrum":
        """Eigen-decompose a positive semidefinite matrix.

        Eigenvalues below ``dim · eps · λ_max`` count as zero.

        Raises
        ------
        PreconditionError
            If an eigenvalue is below ``-1e-10 · λ_max``.
        """
        w, V = hermitian_eig(np.asarray(M))
        top = float(np.max(np.abs(w))) if w.size else 0.0
        if w.size and w[0] < -1e-10 * max(top, 1e-300):
            raise PreconditionError(f"{what} is not positive semidefinite (eigenvalue {w[0]:.3e})")
        zero = w.size * np.finfo(float).eps * top
        with np.errstate(divide="ignore"):
            logs = np.where(w > zero, np.log(np.maximum(w, 1e-300)), -np.inf)
        return cls(log_values=logs, vectors=V)

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)

    def trace(self) -> float:
        return float(np.exp(logsumexp(self.log_values))) if np.any(np.isfinite(self.log_values)) else 0.0

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.values[None, :]) @ self.vectors.conj().T

    def rotated(self, U: np.ndarray) -> "LogSpectrum":
        """Spectrum of ``U X U†``; ``U`` may be the 1-D diagonal of a diagonal unitary."""
        U = np.asarray(U)
        vectors = U[:, None] * self.vectors if U.ndim == 1 else U @ self.vectors
        return LogSpectrum(log_values=self.log_values, vectors=vectors)


def hamiltonian(phi: Interaction, V: Volume, strict: bool = True, as_sparse: bool = False):
    """``H_V = Σ_{Λ ⊆ V} φ(Λ)`` embedded on ``V``.

    ``strict=False`` drops terms cut by the boundary of ``V``, which gives the
    open-boundary Hamiltonian of ``Φ`` restricted to ``V``.

    Raises
    ------
    SupportError
        If a term meets ``V`` without being contained in it (unless ``strict=False``).
    """
    inside = phi.terms_within(V.sites)
    if strict:
        dangling = set(phi.terms_meeting(V.sites)) - set(inside)
        if dangling:
            first = phi.terms[min(dangling)].support
            raise SupportError(f"{len(dangling)} terms stick out of the volume, first on {first}")
    return local_sum([phi.terms[i] for i in inside], V, as_sparse=as_sparse).matrix


class GibbsState(BaseModel):
    """Density matrix with the ``(H, β)`` it is tested against.

    ``rho`` is the Gibbs state when built by :func:`gibbs`; other states may be
    wrapped to test the KMS condition against them.
    """

    rho: np.ndarray = Field(description="Density matrix on H_V.")
    beta: float
    H: np.ndarray
    logZ: Optional[float] = Field(default=None, description="log Tr e^{-βH}, set by gibbs().")
    energies: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check(self) -> "GibbsState":
        if self.rho.shape != self.H.shape:
            raise ValueError("rho and H must have the same shape")
        trace = complex(np.trace(self.rho))
        if abs(trace - 1.0) > 1e-10:
            raise ValueError(f"density matrix has trace {trace:.12g}")
        return self

    @property
    def is_gibbs(self) -> bool:
        return self.logZ is not None and self.energies is not None

    def log_spectrum(self) -> LogSpectrum:
        if self.is_gibbs:
            return LogSpectrum(log_values=-self.beta * self.energies - self.logZ, vectors=self.eigenvectors)
        return LogSpectrum.from_matrix(self.rho, "density matrix")

    def expectation(self, A: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ A))

    def commutator_defect(self) -> float:
        return op_norm(self.rho @ self.H - self.H @ self.rho)


def gibbs(H: Union[np.ndarray, sparse.spmatrix], beta: float) -> GibbsState:
    """``ρ = e^{-βH} / Tr e^{-βH}`` from a shifted eigendecomposition.

    Examples
    --------
    >>> state = gibbs(np.diag([1.0, -1.0]), 1.0)
    >>> bool(np.allclose(np.diagonal(state.rho), [np.exp(-1), np.exp(1)] / (np.exp(1) + np.exp(-1))))
    True
    """
    H = H.toarray() if sparse.issparse(H) else np.asarray(H)
    if not is_hermitian(H):
        raise ValueError("Hamiltonian is not Hermitian")
    w, V = hermitian_eig(H)
    exponent = -beta * w
    logZ = float(logsumexp(exponent))
    p = np.exp(exponent - logZ)
    rho = (V * p[None, :]) @ V.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return GibbsState(rho=rho, beta=float(beta), H=H, logZ=logZ, energies=w, eigenvectors=V)


class KMSReport(BaseModel):
    """``|Tr(ρ A e^{-βH} B e^{βH}) - Tr(ρ B A)|``."""

    lhs: complex
    rhs: complex
    defect: float
    scale: float
    passed: bool
    log_domain: bool


def _kms_lhs_rescaled(rho_p: np.ndarray, Ap: np.ndarray, Bp: np.ndarray, gap: np.ndarray) -> complex:
    """``Tr(ρ A M)`` with ``M_kj = B_kj e^{gap_kj}`` when ``e^{gap}`` overflows.

    ``M = e^c M'`` with ``c`` the largest exponent on the support of ``B``; entries
    of ``B`` at round-off level do not count towards the support.
    """
    support = np.abs(Bp) > 1e-14 * max(1.0, float(np.abs(Bp).max(initial=0.0)))
    c = float(gap[support].max()) if support.any() else 0.0
    M = np.where(support, Bp * np.exp(np.minimum(gap - c, 0.0)), 0.0)
    scaled = complex(np.trace(rho_p @ Ap @ M))
    if scaled == 0:
        return 0j
    log_abs = float(np.log(abs(scaled))) + c
    if log_abs >= _LOG_FLOAT_MAX:
        logging.warning("KMS left-hand side exceeds the float range (log |lhs| = %.1f)", log_abs)
        return complex(np.inf, 0.0)
    return complex(np.exp(np.log(scaled) + c))


def kms_check(state: GibbsState, A: np.ndarray, B: np.ndarray, tol: float = 1e-9) -> KMSReport:
    """Evaluate the KMS identity in the eigenbasis of ``H``.

    When ``ρ`` is diagonal in that basis and ``β·(w_max - w_min)`` is large the
    sum is formed in the log domain: ``ρ_kk e^{-β(w_j - w_k)} = e^{-β w_j - log Z}``.
    Otherwise ``e^{-β(w_k - w_j)}`` is shifted by its largest value on the
    support of ``B``, so no exponential overflows; a left-hand side beyond the
    float range is reported as infinite and fails the check.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != state.H.shape or B.shape != state.H.shape:
        raise ValueError("observables must act on the state's Hilbert space")
    if state.energies is not None:
        w, V = state.energies, state.eigenvectors
    else:
        w, V = hermitian_eig(state.H)
    Ap = V.conj().T @ A @ V
    Bp = V.conj().T @ B @ V
    rho_p = V.conj().T @ state.rho @ V
    spread = state.beta * float(w[-1] - w[0]) if w.size else 0.0
    diagonal = bool(np.allclose(rho_p, np.diag(np.diagonal(rho_p)), atol=1e-14))

    log_domain = diagonal and spread > KMS_LOG_DOMAIN
    if log_domain:
        if state.is_gibbs:
            log_p = -state.beta * w - state.logZ
        else:
            with np.errstate(divide="ignore"):
                log_p = np.log(np.maximum(np.real(np.diagonal(rho_p)), 0.0))
        # entry (k, j): log ρ_kk - β w_j + β w_k
        exponent = log_p[:, None] - state.beta * w[None, :] + state.beta * w[:, None]
        lhs = complex(np.sum(Ap * Bp.T * np.exp(exponent)))
    else:
        gap = -state.beta * (w[:, None] - w[None, :])
        if spread < _LOG_FLOAT_MAX:
            lhs = complex(np.trace(rho_p @ Ap @ (Bp * np.exp(gap))))
        else:
            lhs = _kms_lhs_rescaled(rho_p, Ap, Bp, gap)
    rhs = complex(np.trace(rho_p @ Bp @ Ap))
    defect = abs(lhs - rhs)
    scale = max(1.0, op_norm(A) * op_norm(B))
    if log_domain:
        logging.debug("KMS check in log domain (β·spread = %.1f)", spread)
    return KMSReport(lhs=lhs, rhs=rhs, defect=defect, scale=scale, passed=defect <= tol * scale, log_domain=log_domain)
