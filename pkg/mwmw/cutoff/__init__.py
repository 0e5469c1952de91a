"""Smooth truncation of the multipole weights and its Taylor remainders."""

from mwmw.cutoff.profile import (
    CutoffProfile,
    compositions,
    cutoff_weights,
    evaluate_cutoff,
    multi_index_tuple,
    partial_derivative,
    profile_derivative,
    safety_for_resolution,
)
from mwmw.cutoff.taylor import (
    RemainderBound,
    SlabDerivativeReport,
    check_slab_derivatives,
    compute_Ca,
    taylor_polynomial,
    taylor_remainder_bound,
    taylor_remainder_exact,
)

__all__ = [
    "CutoffProfile",
    "RemainderBound",
    "SlabDerivativeReport",
    "check_slab_derivatives",
    "compositions",
    "compute_Ca",
    "cutoff_weights",
    "evaluate_cutoff",
    "multi_index_tuple",
    "partial_derivative",
    "profile_derivative",
    "safety_for_resolution",
    "taylor_polynomial",
    "taylor_remainder_bound",
    "taylor_remainder_exact",
]
