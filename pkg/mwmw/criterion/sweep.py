"""Sweeps of the bound reports over ``m`` and the bounded/growing verdict."""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator
import numpy as np

from mwmw.concurrency import run_rows
from mwmw.criterion.report import MWBoundReport, default_k, mw_bound_report
from mwmw.cutoff.profile import CutoffProfile
from mwmw.errors import ResourceLimitError
from mwmw.model.charges import ChargeFamily
from mwmw.model.decay import check_decay_k
from mwmw.model.interaction import Interaction
from mwmw.symmetry.checks import check_k_symmetric
from mwmw.symmetry.multiindex import MultiIndex


DEFAULT_SLOPE_THRESHOLD = 0.05


class VerdictReport(BaseModel):
    """Bounded/growing classification of ``Dm_norm_triangle`` against ``m``.

    The verdict only speaks for the tested ``m_range``; a bounded verdict
    cannot rule out very slow growth beyond it.
    """

    verdict: str = Field(description="bounded, growing or undetermined.")
    reason: Optional[str] = Field(
        default=None, description="Rule that decided: symmetric_within_bound, nonincreasing, slope or no_rows."
    )
    exponent: Optional[float] = Field(default=None, description="Fitted slope of log D vs log m.")
    threshold: float
    fit_m: List[float] = Field(default_factory=list, description="m values entering the fit.")
    burn_in: Optional[float] = Field(default=None, description="m* from which monotonicity is required.")
    nonincreasing_from: Optional[float] = Field(
        default=None, description="Smallest m after which the triangle sums never increase."
    )
    within_bound: bool = Field(description="Dm_norm_triangle ≤ rhs_bound for every row.")
    symmetric: Optional[bool] = Field(default=None, description="k-symmetry of the interaction; None if unchecked.")
    m_range: Tuple[float, float]


def _fit_exponent(ms: np.ndarray, D: np.ndarray) -> Tuple[Optional[float], List[float]]:
    positive = D > 0
    if positive.sum() < 2:
        return (0.0 if len(ms) >= 2 else None), ms.tolist()
    slope = float(np.polyfit(np.log(ms[positive]), np.log(D[positive]), 1)[0])
    return slope, ms[positive].tolist()


def verdict(
    reports: Sequence[MWBoundReport],
    threshold: float = DEFAULT_SLOPE_THRESHOLD,
    burn_in: Optional[float] = None,
    symmetric: Optional[bool] = None,
) -> VerdictReport:
    """Classify a sweep as bounded or growing.

    A sweep is ``bounded`` when

    * the interaction passed the k-symmetry check (``symmetric``) and every
      ``Dm_norm_triangle`` lies below its ``rhs_bound``, or
    * ``Dm_norm_triangle`` is nonincreasing from the burn-in ``m*`` on, or
    * the slope of ``log Dm_norm_triangle`` against ``log m`` over ``m ≥ m*``
      is at most ``threshold``.

    Otherwise it is ``growing``. ``m*`` defaults to the first ``m`` of the
    upper half of the sweep. The reported exponent is always the fitted slope.
    """
    rows = sorted(reports, key=lambda r: r.m)
    if not rows:
        raise ValueError("no reports to classify")
    ms = np.array([r.m for r in rows], dtype=float)
    D = np.array([r.Dm_norm_triangle for r in rows], dtype=float)
    within = all(r.Dm_norm_triangle <= r.rhs_bound * (1 + 1e-12) + 1e-15 for r in rows)

    nonincreasing_from = None
    for i in range(len(rows)):
        if np.all(np.diff(D[i:]) <= 1e-12 * np.maximum(1.0, D[i:-1])):
            nonincreasing_from = float(ms[i])
            break

    mask = ms >= burn_in if burn_in is not None else np.arange(len(rows)) >= len(rows) // 2
    window_m, window_D = ms[mask], D[mask]
    m_star = float(window_m[0]) if len(window_m) else burn_in
    common = dict(
        threshold=threshold,
        burn_in=m_star,
        within_bound=within,
        nonincreasing_from=nonincreasing_from,
        symmetric=symmetric,
        m_range=(float(ms[0]), float(ms[-1])),
    )
    if len(rows) < 2 or len(window_m) < 2:
        return VerdictReport(verdict="undetermined", reason="no_rows", fit_m=window_m.tolist(), **common)

    slope, fit_m = _fit_exponent(window_m, window_D)
    if symmetric and within:
        return VerdictReport(verdict="bounded", reason="symmetric_within_bound", exponent=slope, fit_m=fit_m, **common)
    if nonincreasing_from is not None and m_star is not None and nonincreasing_from <= m_star:
        return VerdictReport(verdict="bounded", reason="nonincreasing", exponent=slope, fit_m=fit_m, **common)
    label = "bounded" if slope is not None and slope <= threshold else "growing"
    return VerdictReport(verdict=label, reason="slope", exponent=slope, fit_m=fit_m, **common)


class SweepConfig(BaseModel):
    """Everything one ``m``-sweep needs."""

    phi: Interaction
    cf: ChargeFamily
    profile: CutoffProfile
    a: MultiIndex
    k: Optional[int] = Field(default=None, ge=0, description="Symmetry order; defaults to the claimed one.")
    s: float = 1.0
    m_values: List[float] = Field(min_length=1)
    beta: Optional[float] = Field(default=None, ge=0)
    exact: bool = True
    exact_max_m: Optional[float] = Field(default=None, description="Skip exact D_m above this m.")
    threshold: float = Field(default=DEFAULT_SLOPE_THRESHOLD, gt=0)
    burn_in: Optional[float] = None
    symmetric: Optional[bool] = Field(
        default=None, description="Result of the k-symmetry check; computed by the sweep when left unset."
    )
    model_config = ConfigDict(arbitrary_types_allowed=True)

    @field_validator("m_values")
    @classmethod
    def _positive_sorted(cls, v: List[float]) -> List[float]:
        if any(m <= 0 for m in v):
            raise ValueError("m values must be positive")
        return sorted(float(m) for m in v)


class SweepResult(BaseModel):
    reports: List[MWBoundReport]
    verdict: Optional[VerdictReport] = None
    truncated_m: List[float] = Field(default_factory=list, description="m values stopped by a resource limit.")
    notes: List[str] = Field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return bool(self.truncated_m)


def sweep(config: SweepConfig, threads: int = 1, progress: bool = False) -> SweepResult:
    """Compute one :class:`MWBoundReport` per ``m`` and classify the sequence.

    Rows run independently on up to ``threads`` workers; output is ordered by
    ``m``. Rows hitting a resource limit are listed in ``truncated_m``.
    """
    a = config.a
    k = config.k if config.k is not None else default_k(config.phi, a)
    decay_sup = check_decay_k(config.phi, config.cf, k).sup_value
    notes: List[str] = []
    symmetric = config.symmetric
    if symmetric is None:
        try:
            symmetric = check_k_symmetric(config.phi, config.cf, k).passed
        except ResourceLimitError as exc:
            notes.append(f"k-symmetry not checked: {exc}")

    def row(m: float) -> MWBoundReport:
        exact = config.exact and (config.exact_max_m is None or m <= config.exact_max_m)
        return mw_bound_report(
            config.phi,
            config.cf,
            config.profile,
            a,
            config.s,
            m,
            k=k,
            beta=config.beta,
            exact=exact,
            decay_sup=decay_sup,
        )

    results = run_rows(row, config.m_values, threads=threads, desc=f"Sweep a={a}", progress=progress)
    reports: List[MWBoundReport] = []
    truncated: List[float] = []
    for m, res in zip(config.m_values, results):
        if isinstance(res, (ResourceLimitError, OverflowError, MemoryError)):
            truncated.append(m)
            notes.append(f"m={m:g}: {res}")
        elif isinstance(res, BaseException):
            raise res
        else:
            reports.append(res)

    summary = verdict(reports, config.threshold, config.burn_in, symmetric) if reports else None
    if summary is not None:
        reports = [r.model_copy(update={"verdict": summary.verdict}) for r in reports]
        logging.info(
            "Sweep %s a=%s over m=%s: %s (exponent %s)",
            config.phi.name,
            a,
            config.m_values,
            summary.verdict,
            summary.exponent,
        )
    return SweepResult(reports=reports, verdict=summary, truncated_m=truncated, notes=notes)
