"""Per-``m`` reports tying ``D_m``, the closed-form bound and the relative entropies together."""

from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field
import numpy as np

from mwmw.algebra.operators import Volume
from mwmw.configs.settings import app_config
from mwmw.criterion.bound import compute_Dm, geometric_factor, rhs_bound, sweep_volume, twisted_difference
from mwmw.cutoff.profile import CutoffProfile
from mwmw.cutoff.taylor import compute_Ca
from mwmw.errors import ResourceLimitError
from mwmw.model.charges import ChargeFamily
from mwmw.model.decay import check_decay_k
from mwmw.model.interaction import Interaction
from mwmw.symmetry.multiindex import MultiIndex
from mwmw.symmetry.unitary import MultiIndexLike, build_truncated_unitary
from mwmw.thermal.entropy import relative_entropy
from mwmw.thermal.gibbs import gibbs, hamiltonian


CSV_COLUMNS: List[str] = [
    "m",
    "a",
    "s",
    "beta",
    "Qm_size",
    "Dm_norm_exact",
    "Dm_norm_triangle",
    "rhs_bound",
    "S_fwd",
    "S_bwd",
    "beta_trace",
    "equality_defect",
    "verdict",
]


class MWBoundReport(BaseModel):
    """One row of an ``m``-sweep.

    Attributes
    ----------
    Dm_norm_exact : float | None
        ``‖D_m‖``; ``None`` past the exact limits.
    Dm_norm_triangle : float
        ``Σ_Λ ‖U φ(Λ) U† − φ(Λ) + U† φ(Λ) U − φ(Λ)‖``.
    rhs_bound : float
        ``4 s² C_a² N0² |Q_m| m^{-2(k−|a|+1)} · decay_sup``.
    S_fwd, S_bwd : float | None
        ``S(ρ‖UρU†)`` and ``S(ρ‖U†ρU)`` for the Gibbs state on the volume.
    beta_trace : float | None
        ``β Tr(ρ (U H U† + U† H U − 2H))``.
    equality_defect : float | None
        ``|S_fwd + S_bwd − beta_trace|``.
    """

    m: float
    a: str
    s: float
    beta: Optional[float] = None
    k: int
    Qm_size: int
    Dm_norm_exact: Optional[float] = None
    Dm_exact_method: str = "skipped"
    Dm_norm_triangle: float
    rhs_bound: float
    geometric_factor: float = Field(description="|Q_m| / m^{2(k−|a|+1)}.")
    C_a: float
    decay_sup: float
    S_fwd: Optional[float] = None
    S_bwd: Optional[float] = None
    beta_trace: Optional[float] = None
    equality_defect: Optional[float] = None
    volume_dim: int
    verdict: str = ""
    truncated: bool = False
    note: str = ""

    def exact_within_triangle(self, slack: float = 1e-9) -> bool:
        return self.Dm_norm_exact is None or self.Dm_norm_exact <= self.Dm_norm_triangle + slack

    def equality_holds(self, rel_tol: float = 1e-8) -> bool:
        if self.equality_defect is None:
            return True
        return self.equality_defect <= rel_tol * max(1.0, abs(self.beta_trace))

    def to_row(self) -> Dict[str, Any]:
        data = self.model_dump()
        return {column: data[column] for column in CSV_COLUMNS}


def default_k(phi: Interaction, a: MultiIndex) -> int:
    if phi.k_claimed is not None and phi.k_claimed >= a.order:
        return phi.k_claimed
    return a.order


def mw_bound_report(
    phi: Interaction,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndexLike,
    s: float,
    m: float,
    k: Optional[int] = None,
    beta: Optional[float] = None,
    V: Optional[Volume] = None,
    exact: bool = True,
    decay_sup: Optional[float] = None,
) -> MWBoundReport:
    """Fill a :class:`MWBoundReport`; entropy columns need ``beta`` and a volume within ``DENSE_LIMIT``.

    ``k`` defaults to the claimed order of ``phi`` (or ``|a|`` if that is smaller).
    """
    a = MultiIndex.of(a)
    k = default_k(phi, a) if k is None else int(k)
    V = V if V is not None else sweep_volume(phi, cf, m)
    if decay_sup is None:
        decay_sup = check_decay_k(phi, cf, k).sup_value
    C_a = compute_Ca(profile, a, k)

    triangle = compute_Dm(phi, cf, profile, a, s, m, mode="per_term")
    exact_result = compute_Dm(phi, cf, profile, a, s, m, V=V, mode="exact") if exact else None
    rhs = rhs_bound(a, k, s, C_a, cf.N0, m, triangle.Qm_size, decay_sup)
    fields: Dict[str, Any] = dict(
        m=float(m),
        a=str(a),
        s=float(s),
        beta=None if beta is None else float(beta),
        k=k,
        Qm_size=triangle.Qm_size,
        Dm_norm_exact=exact_result.norm if exact_result is not None else None,
        Dm_exact_method=exact_result.method if exact_result is not None else "skipped",
        Dm_norm_triangle=triangle.norm,
        rhs_bound=rhs,
        geometric_factor=geometric_factor(triangle.Qm_size, m, k, a.order),
        C_a=C_a,
        decay_sup=decay_sup,
        volume_dim=V.total_dim,
    )

    if beta is not None:
        if V.total_dim > app_config.DENSE_LIMIT:
            fields["note"] = f"entropy columns skipped: volume dimension {V.total_dim}"
        else:
            fields.update(_entropy_columns(phi, cf, profile, a, s, m, float(beta), V))
    report = MWBoundReport(**fields)
    logging.debug(
        "m=%g a=%s: triangle %.6g, exact %s, rhs %.6g", m, a, report.Dm_norm_triangle, report.Dm_norm_exact, rhs
    )
    return report


def _entropy_columns(
    phi: Interaction, cf: ChargeFamily, profile: CutoffProfile, a: MultiIndex, s: float, m: float, beta: float, V
) -> Dict[str, float]:
    # terms cut by V do not meet Q_m and cancel in the twisted difference
    H = hamiltonian(phi, V, strict=False)
    U = build_truncated_unitary(cf, profile, a, s, m, V).unitary
    U_dag = U.conj() if np.ndim(U) == 1 else U.conj().T
    state = gibbs(H, beta)
    spectrum = state.log_spectrum()
    S_fwd = float(relative_entropy(state, spectrum.rotated(U)))
    S_bwd = float(relative_entropy(state, spectrum.rotated(U_dag)))
    beta_trace = float(beta * np.real(state.expectation(twisted_difference(H, U))))
    return dict(S_fwd=S_fwd, S_bwd=S_bwd, beta_trace=beta_trace, equality_defect=abs(S_fwd + S_bwd - beta_trace))


def entropy_bound_report(
    phi: Interaction,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndexLike,
    s: float,
    m: float,
    beta: float,
    V: Optional[Volume] = None,
    k: Optional[int] = None,
) -> MWBoundReport:
    """Relative entropies of the twisted Gibbs states next to the ``D_m`` norms.

    ``S_fwd + S_bwd = β Tr(ρ D_m)`` holds for every model; terms that do not
    meet ``Q_m`` cancel from ``U H U† + U† H U − 2H``.

    Raises
    ------
    ResourceLimitError
        If the volume exceeds ``DENSE_LIMIT``.
    """
    V = V if V is not None else sweep_volume(phi, cf, m)
    if V.total_dim > app_config.DENSE_LIMIT:
        raise ResourceLimitError(f"volume dimension {V.total_dim} exceeds DENSE_LIMIT={app_config.DENSE_LIMIT}")
    return mw_bound_report(phi, cf, profile, a, s, m, k=k, beta=beta, V=V)
