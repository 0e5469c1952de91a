"""Multipole generators, truncated unitaries and symmetry checks."""

from mwmw.symmetry.checks import (
    FiniteDynamics,
    GeneratorCommutationReport,
    KSymmetryReport,
    StabilizationReport,
    SymmetryCommutationReport,
    check_generators_commute,
    check_k_symmetric,
    check_symmetry_commutes,
    finite_dynamics,
    stabilization_check,
)
from mwmw.symmetry.multiindex import MultiIndex, multi_indices
from mwmw.symmetry.unitary import (
    TruncatedUnitary,
    apply_tau,
    build_generator,
    build_truncated_unitary,
    collar_generator,
    plateau_m,
    q_sites,
    truncated_conjugation,
    weighted_charge_sum,
)

__all__ = [
    "FiniteDynamics",
    "GeneratorCommutationReport",
    "KSymmetryReport",
    "MultiIndex",
    "StabilizationReport",
    "SymmetryCommutationReport",
    "TruncatedUnitary",
    "apply_tau",
    "build_generator",
    "build_truncated_unitary",
    "check_generators_commute",
    "check_k_symmetric",
    "check_symmetry_commutes",
    "collar_generator",
    "finite_dynamics",
    "multi_indices",
    "plateau_m",
    "q_sites",
    "stabilization_check",
    "truncated_conjugation",
    "weighted_charge_sum",
]
