"""The Mermin-Wagner criterion engine: ``h_m``, ``D_m``, the closed-form bound and ``m``-sweeps."""

from mwmw.criterion.bound import (
    DmResult,
    compute_Dm,
    compute_hm,
    compute_Qm,
    geometric_factor,
    required_sites,
    rhs_bound,
    sweep_volume,
    term_twist,
    twisted_difference,
)
from mwmw.criterion.remainder import RemainderConjugationReport, remainder_conjugation_check
from mwmw.criterion.report import CSV_COLUMNS, MWBoundReport, default_k, entropy_bound_report, mw_bound_report
from mwmw.criterion.sweep import SweepConfig, SweepResult, VerdictReport, sweep, verdict

__all__ = [
    "CSV_COLUMNS",
    "DmResult",
    "MWBoundReport",
    "RemainderConjugationReport",
    "SweepConfig",
    "SweepResult",
    "VerdictReport",
    "compute_Dm",
    "compute_Qm",
    "compute_hm",
    "default_k",
    "entropy_bound_report",
    "geometric_factor",
    "mw_bound_report",
    "remainder_conjugation_check",
    "required_sites",
    "rhs_bound",
    "sweep",
    "sweep_volume",
    "term_twist",
    "twisted_difference",
    "verdict",
]
