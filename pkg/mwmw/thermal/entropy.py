"""Relative entropy, perturbed Gibbs functionals and the finite-volume entropy identities.

Relative entropies are evaluated from eigendecompositions:

    S(ρ‖σ) = Σ_i p_i log p_i - Σ_{i,j} p_i |⟨u_i|v_j⟩|² log q_j .

Gibbs states and perturbed functionals carry their exact log-spectra, so
no logarithm of a tiny eigenvalue is ever taken for them.
"""

from __future__ import annotations

from typing import Any, Optional, Sequence, Union

from pydantic import BaseModel, ConfigDict, Field
from scipy.special import logsumexp
import numpy as np

from mwmw.algebra.linalg import hermitian_eig, is_hermitian, unitarity_defect
from mwmw.algebra.operators import LocalOperator, Volume, embed, partial_trace
from mwmw.configs.settings import app_config
from mwmw.cutoff.profile import CutoffProfile
from mwmw.errors import PreconditionError
from mwmw.model.charges import ChargeFamily
from mwmw.symmetry.unitary import MultiIndexLike, apply_tau, build_truncated_unitary
from mwmw.thermal.gibbs import GibbsState, LogSpectrum, gibbs


# ρ weight on the kernel of σ above which S(ρ‖σ) is infinite.
SUPPORT_TOL = 1e-12


class RelativeEntropy(BaseModel):
    """``S(ρ‖σ)``; ``value`` is ``None`` when the support condition fails."""

    value: Optional[float] = None
    infinite: bool = False
    trace_sigma: float = Field(description="Tr σ; the value may be negative when it is not 1.")
    kernel_weight: float = Field(default=0.0, description="Weight of ρ on the numerical kernel of σ.")

    def __float__(self) -> float:
        return float("inf") if self.infinite else float(self.value)


def _spectrum(x: Any, what: str) -> LogSpectrum:
    if isinstance(x, LogSpectrum):
        return x
    if hasattr(x, "log_spectrum"):
        return x.log_spectrum()
    return LogSpectrum.from_matrix(np.asarray(x), what)


def relative_entropy(
    rho: Union[np.ndarray, GibbsState, LogSpectrum],
    sigma: Union[np.ndarray, "PerturbedFunctional", GibbsState, LogSpectrum],
    allow_unnormalized: bool = False,
) -> RelativeEntropy:
    """Quantum relative entropy ``Tr ρ (log ρ - log σ)`` with natural logarithms.

    Parameters
    ----------
    rho : array, GibbsState or LogSpectrum
        A state (trace one).
    sigma : array, PerturbedFunctional, GibbsState or LogSpectrum
        Positive operator; must have trace one unless ``allow_unnormalized``.
    allow_unnormalized : bool, default=False
        Accept ``Tr σ ≠ 1``; the result can then be negative.

    Returns
    -------
    RelativeEntropy
        Value, or the ``infinite`` flag if ``supp ρ ⊄ supp σ``.

    Examples
    --------
    >>> float(relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2))  # doctest: +ELLIPSIS
    0.693147...
    """
    rs = _spectrum(rho, "rho")
    ss = _spectrum(sigma, "sigma")
    if rs.vectors.shape != ss.vectors.shape:
        raise ValueError("rho and sigma act on different spaces")
    trace_rho = rs.trace()
    if abs(trace_rho - 1.0) > 1e-8:
        raise PreconditionError(f"rho has trace {trace_rho:.12g}")
    trace_sigma = ss.trace()
    if not allow_unnormalized and abs(trace_sigma - 1.0) > 1e-8:
        raise PreconditionError(f"sigma has trace {trace_sigma:.12g}; pass allow_unnormalized=True")

    p = rs.values
    overlaps = np.abs(rs.vectors.conj().T @ ss.vectors) ** 2
    weights = p @ overlaps
    kernel = ~np.isfinite(ss.log_values)
    kernel_weight = float(np.sum(weights[kernel]))
    if kernel_weight > SUPPORT_TOL:
        return RelativeEntropy(infinite=True, trace_sigma=trace_sigma, kernel_weight=kernel_weight)

    finite_r = np.isfinite(rs.log_values)
    entropy = float(np.sum(p[finite_r] * rs.log_values[finite_r]))
    cross = float(np.sum(weights[~kernel] * ss.log_values[~kernel]))
    return RelativeEntropy(value=entropy - cross, trace_sigma=trace_sigma, kernel_weight=kernel_weight)


class PerturbedFunctional(BaseModel):
    """``σ = e^{-β(H - W)} / Tr e^{-βH}``, normalised by the unperturbed partition function."""

    H: np.ndarray
    W: np.ndarray
    beta: float
    logZ: float = Field(description="log Tr e^{-βH}.")
    energies: np.ndarray = Field(description="Spectrum of H - W.")
    eigenvectors: np.ndarray
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def log_spectrum(self) -> LogSpectrum:
        return LogSpectrum(log_values=-self.beta * self.energies - self.logZ, vectors=self.eigenvectors)

    @property
    def sigma(self) -> np.ndarray:
        return self.log_spectrum().matrix()

    @property
    def trace(self) -> float:
        return float(np.exp(logsumexp(-self.beta * self.energies) - self.logZ))

    def __call__(self, A: np.ndarray) -> complex:
        """``ω^W(A) = Tr(σ A)``."""
        return complex(np.trace(self.sigma @ A))


def perturbed_gibbs(H: np.ndarray, W: np.ndarray, beta: float) -> PerturbedFunctional:
    """Unnormalised perturbed Gibbs functional; ``W = c·I`` scales the Gibbs state by ``e^{βc}``."""
    H = np.asarray(H)
    W = np.asarray(W)
    if not is_hermitian(W):
        raise ValueError("perturbation W is not self-adjoint")
    base = gibbs(H, beta)
    w, V = hermitian_eig(H - W)
    return PerturbedFunctional(H=H, W=W, beta=float(beta), logZ=base.logZ, energies=w, eigenvectors=V)


class IdentityReport(BaseModel):
    """Two sides of an exact identity and their difference."""

    lhs: Optional[float]
    rhs: float
    defect: float
    passed: bool
    tol: float


def _identity(lhs: RelativeEntropy, rhs: float, tol: float) -> IdentityReport:
    if lhs.infinite:
        return IdentityReport(lhs=None, rhs=rhs, defect=float("inf"), passed=False, tol=tol)
    defect = abs(lhs.value - rhs)
    return IdentityReport(lhs=lhs.value, rhs=rhs, defect=defect, passed=defect <= tol * max(1.0, abs(rhs)), tol=tol)


def entropy_perturbation_identity(H: np.ndarray, W: np.ndarray, beta: float, tol: float = 1e-9) -> IdentityReport:
    """``S(ρ‖σ_W) = -β Tr(ρ W)`` for the Gibbs state ``ρ`` and the perturbed functional ``σ_W``."""
    state = gibbs(H, beta)
    lhs = relative_entropy(state, perturbed_gibbs(H, W, beta), allow_unnormalized=True)
    rhs = float(-beta * np.real(state.expectation(np.asarray(W))))
    return _identity(lhs, rhs, tol)


def twist_identity(H: np.ndarray, U: np.ndarray, beta: float, tol: float = 1e-9) -> IdentityReport:
    """``S(ρ‖UρU†) = β Tr(ρ (U H U† - H))`` for ``ρ = gibbs(H, β)`` and unitary ``U``."""
    U = np.asarray(U)
    if U.ndim == 1:
        U = np.diag(U)
    if unitarity_defect(U) > app_config.UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (defect {unitarity_defect(U):.3e})")
    state = gibbs(H, beta)
    lhs = relative_entropy(state, state.log_spectrum().rotated(U))
    H = np.asarray(H)
    rhs = float(beta * np.real(state.expectation(U @ H @ U.conj().T - H)))
    return _identity(lhs, rhs, tol)


class UhlmannReport(BaseModel):
    """Monotonicity ``S(ρ_1‖σ_1) ≤ S(ρ‖σ)`` under restriction to a subvolume."""

    marginal: RelativeEntropy
    full: RelativeEntropy
    passed: bool
    slack: float


def uhlmann_check(
    rho: np.ndarray, sigma: np.ndarray, V2: Volume, V1: Union[Volume, Sequence[int]], slack: float = 1e-9
) -> UhlmannReport:
    full = relative_entropy(rho, sigma)
    marginal = relative_entropy(partial_trace(rho, V2, V1), partial_trace(sigma, V2, V1))
    if full.infinite:
        passed = True
    elif marginal.infinite:
        passed = False
    else:
        passed = marginal.value <= full.value + slack
    return UhlmannReport(marginal=marginal, full=full, passed=passed, slack=slack)


class TracialReport(BaseModel):
    """``|tr(τ_s(A)) - tr(A)|`` for the normalised trace."""

    before: float = Field(description="Real part of tr(A).")
    after: float = Field(description="Real part of tr(τ_s(A)).")
    defect: float
    passed: bool
    truncated: bool = Field(description="τ_s was played by U_m on the volume instead of the untruncated action.")


def normalized_trace(A: LocalOperator) -> complex:
    return complex(np.trace(A.dense())) / A.dim


def tracial_invariance_check(
    V: Volume,
    cf: ChargeFamily,
    a: MultiIndexLike,
    s: float,
    A: LocalOperator,
    m: Optional[float] = None,
    profile: Optional[CutoffProfile] = None,
    tol: float = 1e-12,
) -> TracialReport:
    """The infinite-temperature state is invariant under every multipole action.

    With ``m`` the truncated unitary on ``V`` (which must contain ``Q_m``) is used.
    """
    if not V.contains(A.support):
        raise ValueError("observable is not supported in the volume")
    if m is None:
        moved = apply_tau(A, cf, a, s)
    else:
        profile = profile or CutoffProfile(dim=cf.lattice.dim_ambient)
        moved = build_truncated_unitary(cf, profile, a, s, m, V).conjugate(A)
    before = complex(np.trace(embed(A, V))) / V.total_dim
    after = normalized_trace(moved)
    defect = abs(after - before)
    return TracialReport(
        before=before.real,
        after=after.real,
        defect=defect,
        passed=defect <= tol * max(1.0, A.norm()),
        truncated=m is not None,
    )
