"""Gibbs states, relative entropy and the finite-volume entropy identities."""

from mwmw.thermal.entropy import (
    IdentityReport,
    PerturbedFunctional,
    RelativeEntropy,
    TracialReport,
    UhlmannReport,
    entropy_perturbation_identity,
    normalized_trace,
    perturbed_gibbs,
    relative_entropy,
    tracial_invariance_check,
    twist_identity,
    uhlmann_check,
)
from mwmw.thermal.gibbs import GibbsState, KMSReport, LogSpectrum, gibbs, hamiltonian, kms_check
from mwmw.thermal.suite import (
    SuiteRow,
    entropy_identity_suite,
    kms_suite,
    random_density,
    random_hermitian,
    random_matrix,
    random_unitary,
    tracial_suite,
    uhlmann_suite,
)

__all__ = [
    "GibbsState",
    "IdentityReport",
    "KMSReport",
    "LogSpectrum",
    "PerturbedFunctional",
    "RelativeEntropy",
    "SuiteRow",
    "TracialReport",
    "UhlmannReport",
    "entropy_identity_suite",
    "entropy_perturbation_identity",
    "gibbs",
    "hamiltonian",
    "kms_check",
    "kms_suite",
    "normalized_trace",
    "perturbed_gibbs",
    "random_density",
    "random_hermitian",
    "random_matrix",
    "random_unitary",
    "relative_entropy",
    "tracial_invariance_check",
    "tracial_suite",
    "twist_identity",
    "uhlmann_check",
    "uhlmann_suite",
]
