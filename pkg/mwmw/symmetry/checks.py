"""k-symmetry of interactions, stabilisation of ``U_m† A U_m`` and symmetry of the dynamics."""

from __future__ import annotations

import itertools
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field
import numpy as np

from mwmw.algebra.linalg import hermitian_exp, op_norm
from mwmw.algebra.operators import LocalOperator, Volume, embed
from mwmw.cutoff.profile import CutoffProfile
from mwmw.errors import PreconditionError, SupportError
from mwmw.model.charges import ChargeFamily
from mwmw.model.interaction import Interaction, surface_energy
from mwmw.symmetry.multiindex import MultiIndex, multi_indices
from mwmw.symmetry.unitary import (
    MultiIndexLike,
    apply_tau,
    collar_generator,
    dagger_conjugate,
    full_weights,
    generator_diagonal,
    phase_unitary,
    truncated_conjugation,
    truncated_weights,
    weighted_charge_sum,
)


def _commutator_norm(G: LocalOperator, A: np.ndarray) -> float:
    """``‖[G, A]‖`` using the diagonal of ``G`` when available."""
    diagonal = generator_diagonal(G)
    if diagonal is not None:
        return op_norm((diagonal[:, None] - diagonal[None, :]) * A)
    Gd = G.dense()
    return op_norm(Gd @ A - A @ Gd)


class TermSymmetryRecord(BaseModel):
    a: str
    term_id: int
    support: Tuple[int, ...]
    defect_norm: float
    passed: bool


class KSymmetryReport(BaseModel):
    """Commutators ``[G^{(a)}|_{collar(Λ)}, φ(Λ)]`` for every ``a ∈ T_k`` and every term."""

    passed: bool
    k: int
    index_set_I: Tuple[int, ...]
    indices: List[str] = Field(description="Multi-indices checked, comma-joined.")
    n_terms: int
    max_defect: float
    records: List[TermSymmetryRecord] = Field(default_factory=list, description="One record per (a, term).")
    witnesses: List[TermSymmetryRecord] = Field(default_factory=list, description="Failing records.")

    def failed_indices(self) -> List[str]:
        return sorted({w.a for w in self.witnesses})


def check_k_symmetric(
    phi: Interaction, cf: ChargeFamily, k: int, index_set_I: Optional[Iterable[int]] = None, tol: float = 1e-12
) -> KSymmetryReport:
    """Check invariance of every term under the multipole actions of order at most ``k``.

    Since the charges commute, ``τ_s(φ(Λ)) = φ(Λ)`` for all ``s`` exactly when
    the collar generator commutes with ``φ(Λ)``; the commutator norm is
    compared to ``tol · max(1, ‖G‖‖φ(Λ)‖)``. ``index_set_I`` defaults to the
    interaction's own index set.
    """
    I = tuple(sorted(phi.index_set_I if index_set_I is None else index_set_I))
    indices = multi_indices(phi.lattice.dim_ambient, k, I)
    records: List[TermSymmetryRecord] = []
    for a in indices:
        for term_id, (term, weight) in enumerate(zip(phi.terms, phi.term_norms)):
            G = collar_generator(cf, a, term.support)
            defect = _commutator_norm(G, embed(term, G.volume))
            scale = max(1.0, G.norm() * weight)
            records.append(
                TermSymmetryRecord(
                    a=str(a), term_id=term_id, support=term.support, defect_norm=defect, passed=defect <= tol * scale
                )
            )
    witnesses = [r for r in records if not r.passed]
    if witnesses:
        logging.info("k-symmetry (k=%d) fails for %d (a, term) pairs of %s", k, len(witnesses), phi.name)
    return KSymmetryReport(
        passed=not witnesses,
        k=k,
        index_set_I=I,
        indices=[str(a) for a in indices],
        n_terms=len(phi.terms),
        max_defect=max((r.defect_norm for r in records), default=0.0),
        records=records,
        witnesses=witnesses,
    )


class StabilizationReport(BaseModel):
    """``U_m† A U_m`` along ``m``, compared with the untruncated action."""

    passed: bool
    m0: int = Field(description="ceil(|supp A|_∞ + R0).")
    m_values: List[float]
    defects: List[float] = Field(description="‖U_m† A U_m − U_{m_last}† A U_{m_last}‖ per m.")
    max_defect_beyond_m0: float
    stable_from: Optional[float] = Field(default=None, description="Smallest tested m after which all values agree.")
    tau_defect: float = Field(description="‖stabilised value − τ_s(A)‖.")
    tol: float


def stabilization_check(
    A: LocalOperator,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndexLike,
    s: float,
    m_range: Sequence[float],
    tol: float = 1e-10,
) -> StabilizationReport:
    """Check that ``U_m† A U_m`` is constant for ``m ≥ m0`` and equals ``τ_s(A)``.

    Raises
    ------
    PreconditionError
        If no value of ``m_range`` reaches ``m0``.
    """
    m_values = sorted(float(m) for m in m_range)
    coords = cf.lattice.coords[list(A.support)] if A.support else np.zeros((1, cf.lattice.dim_ambient))
    m0 = math.ceil(float(np.max(np.abs(coords))) + cf.R0)
    if not m_values or m_values[-1] < m0:
        raise PreconditionError(f"m_range {m_values} does not reach m0 = {m0}")

    values = [truncated_conjugation(A, cf, profile, a, s, m).dense() for m in m_values]
    reference = values[-1]
    defects = [op_norm(v - reference) for v in values]
    beyond = [d for m, d in zip(m_values, defects) if m >= m0]
    stable_from = None
    for i in range(len(m_values)):
        if all(d <= tol for d in defects[i:]):
            stable_from = m_values[i]
            break
    tau = apply_tau(A, cf, a, s).dense()
    tau_defect = op_norm(tau - reference)
    passed = max(beyond) <= tol and tau_defect <= tol
    return StabilizationReport(
        passed=passed,
        m0=m0,
        m_values=m_values,
        defects=defects,
        max_defect_beyond_m0=max(beyond),
        stable_from=stable_from,
        tau_defect=tau_defect,
        tol=tol,
    )


class FiniteDynamics(BaseModel):
    """``α_t(A) = e^{itH_V} A e^{-itH_V}`` with ``H_V`` the sum of the terms inside ``V``."""

    volume: Volume
    t: float
    evolution: np.ndarray = Field(description="e^{itH_V}.")
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def apply_matrix(self, A: np.ndarray) -> np.ndarray:
        U = self.evolution
        return U @ A @ U.conj().T

    def __call__(self, A: LocalOperator) -> LocalOperator:
        matrix = self.apply_matrix(embed(A, self.volume))
        return LocalOperator(support=self.volume.sites, dims=self.volume.dims, matrix=matrix, hermitian=A.hermitian)


def finite_dynamics(phi: Interaction, V: Volume, t: float) -> FiniteDynamics:
    H = surface_energy(phi, V.sites, V)
    return FiniteDynamics(volume=V, t=float(t), evolution=hermitian_exp(H.dense(), 1j * t))


class SymmetryCommutationReport(BaseModel):
    """``‖α_t(τ_s(A)) − τ_s(α_t(A))‖`` at finite volume."""

    passed: bool
    a: str
    s: float
    t: float
    m: float
    defect: float
    plateau_covers_volume: bool
    volume_sites: int
    tol: float


def _require_range_collar(phi: Interaction, A: LocalOperator, V: Volume) -> None:
    if not A.support:
        return
    d2 = phi.lattice.sq_distances_from(A.support).min(axis=0)
    reach = phi.range**2 * (1 + 1e-12) + 1e-12
    needed = set(int(i) for i in np.flatnonzero(d2 <= reach))
    if not needed.issubset(V.sites):
        raise SupportError(f"volume does not contain an interaction-range collar of {A.support}")


def check_symmetry_commutes(
    phi: Interaction,
    cf: ChargeFamily,
    a: MultiIndexLike,
    s: float,
    t: float,
    A: LocalOperator,
    V: Volume,
    profile: Optional[CutoffProfile] = None,
    m: Optional[float] = None,
    tol: float = 1e-9,
) -> SymmetryCommutationReport:
    """Compare both orders of the dynamics and the truncated symmetry on ``V``.

    ``τ_s`` is played by ``U_m`` built from the charges supported in ``V``;
    by default ``m`` is the smallest value whose plateau covers ``V``.

    Raises
    ------
    SupportError
        If ``V`` lacks an interaction-range collar around ``supp A``.
    """
    _require_range_collar(phi, A, V)
    a = MultiIndex.of(a)
    profile = profile or CutoffProfile(dim=cf.lattice.dim_ambient)
    inside = [x for x in cf.charges_touching(V.sites) if V.contains(cf.charges[x].support)]
    radius = float(np.max(np.abs(cf.lattice.coords[inside]))) if inside else 0.0
    if m is None:
        m = max(1, math.ceil(radius))
    G = weighted_charge_sum(cf, truncated_weights(cf, profile, a, m, positions=inside), V)
    U = phase_unitary(G, s)
    dynamics = finite_dynamics(phi, V, t)

    A_V = embed(A, V)
    lhs = dynamics.apply_matrix(dagger_conjugate(U, A_V))
    rhs = dagger_conjugate(U, dynamics.apply_matrix(A_V))
    defect = op_norm(lhs - rhs)
    return SymmetryCommutationReport(
        passed=defect <= tol,
        a=str(a),
        s=float(s),
        t=float(t),
        m=float(m),
        defect=defect,
        plateau_covers_volume=radius <= m,
        volume_sites=len(V.sites),
        tol=tol,
    )


class GeneratorCommutationReport(BaseModel):
    passed: bool
    pairs_checked: int
    max_defect: float
    witness: Optional[Tuple[str, str]] = None


def check_generators_commute(
    cf: ChargeFamily, indices: Sequence[MultiIndexLike], V: Volume, tol: float = 1e-10
) -> GeneratorCommutationReport:
    """``[G^{(a)}, G^{(b)}] = 0`` on ``V`` for every pair of the given multi-indices."""
    inside = [x for x in cf.charges_touching(V.sites) if V.contains(cf.charges[x].support)]
    generators = [(str(MultiIndex.of(a)), weighted_charge_sum(cf, full_weights(cf, a, inside), V)) for a in indices]
    worst, witness = 0.0, None
    for (na, Ga), (nb, Gb) in itertools.combinations(generators, 2):
        defect = _commutator_norm(Ga, Gb.dense())
        scale = max(1.0, Ga.norm() * Gb.norm())
        if defect / scale > worst:
            worst, witness = defect / scale, (na, nb)
    pairs = len(generators) * (len(generators) - 1) // 2
    return GeneratorCommutationReport(passed=worst <= tol, pairs_checked=pairs, max_defect=worst, witness=witness)
