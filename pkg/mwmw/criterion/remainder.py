"""Cancellation of the polynomial part of ``U_m`` on a single term.

Around an anchor ``x ∈ Λ`` the weights split as ``χ_m^{(a)}(z) = T_k(x; z) + R_{k+1}(x, z)``.
The Taylor part is a combination of the order-``≤ k`` multipole generators
restricted to the collar of ``Λ``, which commute with a ``k``-symmetric term.
Only ``W_R = Σ_z R_{k+1}(x, z) n_z`` survives.
"""

from __future__ import annotations

from typing import Optional, Union

from pydantic import BaseModel, Field
import numpy as np

from mwmw.algebra.linalg import conjugate_unitary, op_norm
from mwmw.algebra.operators import LocalOperator, embed
from mwmw.cutoff.profile import CutoffProfile
from mwmw.cutoff.taylor import compute_Ca, taylor_remainder_exact
from mwmw.errors import PreconditionError
from mwmw.model.charges import ChargeFamily
from mwmw.model.interaction import Interaction
from mwmw.symmetry.checks import check_k_symmetric
from mwmw.symmetry.multiindex import MultiIndex
from mwmw.symmetry.unitary import (
    MultiIndexLike,
    dagger_conjugate,
    phase_unitary,
    truncated_weights,
    weighted_charge_sum,
)


class RemainderConjugationReport(BaseModel):
    """The three facts behind the per-term estimate for one ``(Λ, x)``."""

    term_id: int
    support: tuple
    anchor: int
    a: str
    k: int
    m: float
    s: float
    remainder_l1: float = Field(description="Σ_z |R_{k+1}(x, z)| over charges touching Λ.")
    cancellation_defect: float = Field(description="‖U φ U† − e^{isW_R} φ e^{−isW_R}‖.")
    F_norm: float = Field(description="‖F_{Λ,x}(s)‖.")
    F_at_zero: float
    F_prime_at_zero: float = Field(description="Central difference of F at 0.")
    twist_defect: float = Field(description="‖F_{Λ,x}(s) − (UφU† − φ + U†φU − φ)‖.")
    remainder_bound: float = Field(description="4 s² N0² (Σ_z |R|)² ‖φ(Λ)‖.")
    taylor_bound: float = Field(description="4 s² C_a² N0² m^{-2(k−|a|+1)} (Σ_z |x − z|^{k+1})² ‖φ(Λ)‖.")
    passed: bool


def _F(phi_c: np.ndarray, w: np.ndarray, r: float) -> np.ndarray:
    """``e^{-irW} φ e^{irW} − φ + e^{irW} φ e^{-irW} − φ`` for a diagonal ``W``."""
    phases = np.exp(1j * r * w)
    return dagger_conjugate(phases, phi_c) + conjugate_unitary(phases, phi_c, check=False) - 2.0 * phi_c


def remainder_conjugation_check(
    phi: Interaction,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndexLike,
    k: int,
    m: float,
    term: Union[int, LocalOperator],
    anchor: Optional[int] = None,
    s: float = 1.0,
    tol: float = 1e-10,
    step: float = 1e-4,
) -> RemainderConjugationReport:
    """Verify ``U φ U† = e^{isW_R} φ e^{−isW_R}`` and the second-order bound of ``F_{Λ,x}``.

    Parameters
    ----------
    phi : Interaction
    cf : ChargeFamily
        Must consist of onsite diagonal charges.
    profile : CutoffProfile
    a : multi-index
        With ``|a| ≤ k``.
    k : int
        Symmetry order the term is checked against.
    m : float
    term : int or LocalOperator
        Position of the term in ``phi`` or the term itself.
    anchor : int, optional
        Site ``x ∈ Λ``; defaults to the first site of the support.
    s : float, default=1.0
    tol : float, default=1e-10
        Tolerance of the cancellation identity.
    step : float, default=1e-4
        Step of the central difference for ``F'(0)``.

    Raises
    ------
    PreconditionError
        If ``|a| > k``, the anchor is outside ``Λ``, the charges are not onsite
        diagonal, or the term is not ``k``-symmetric.
    """
    a = MultiIndex.of(a)
    if a.order > k:
        raise PreconditionError(f"|a| = {a.order} must not exceed k = {k}")
    if not cf.onsite_diagonal:
        raise PreconditionError("remainder conjugation needs onsite diagonal charges")
    if isinstance(term, LocalOperator):
        term_id = next((i for i, t in enumerate(phi.terms) if t.support == term.support), -1)
        op = term
    else:
        term_id, op = int(term), phi.terms[int(term)]
    anchor = op.support[0] if anchor is None else int(anchor)
    if anchor not in op.support:
        raise PreconditionError(f"anchor {anchor} is not in the support {op.support}")

    single = Interaction.from_terms(phi.lattice, [op], index_set_I=phi.index_set_I)
    symmetry = check_k_symmetric(single, cf, k)
    if not symmetry.passed:
        raise PreconditionError(f"term on {op.support} is not {k}-symmetric (defect {symmetry.max_defect:.3e})")

    lat = cf.lattice
    touching = list(cf.charges_touching(op.support))
    volume = cf.volume(cf.collar(op.support))
    x = lat.coords[anchor]
    zs = lat.coords[touching]
    R = np.atleast_1d(taylor_remainder_exact(profile, m, a, k, x[None, :], zs)) if touching else np.zeros(0)
    W = weighted_charge_sum(cf, {z: float(r) for z, r in zip(touching, R)}, volume)
    w = np.real(W.matrix.diagonal())
    G = weighted_charge_sum(cf, truncated_weights(cf, profile, a, m, positions=touching), volume)
    U = phase_unitary(G, s)

    phi_c = embed(op, volume)
    forward = conjugate_unitary(U, phi_c, check=False)
    backward = dagger_conjugate(U, phi_c)
    via_remainder = conjugate_unitary(np.exp(1j * s * w), phi_c, check=False)
    cancellation = op_norm(forward - via_remainder)

    F_s = _F(phi_c, w, s)
    F_prime = op_norm((_F(phi_c, w, step) - _F(phi_c, w, -step)) / (2.0 * step))
    twist = op_norm(F_s - (forward + backward - 2.0 * phi_c))

    N0 = cf.N0
    norm_phi = op.norm()
    l1 = float(np.sum(np.abs(R)))
    remainder_bound = 4.0 * s**2 * N0**2 * l1**2 * norm_phi
    dist = np.linalg.norm(zs - x[None, :], axis=1) if touching else np.zeros(0)
    C_a = compute_Ca(profile, a, k)
    taylor_bound = (
        4.0 * s**2 * C_a**2 * N0**2 * float(m) ** (-2 * (k - a.order + 1)) * float(np.sum(dist ** (k + 1))) ** 2
    ) * norm_phi
    F_norm = op_norm(F_s)
    scale = max(1.0, norm_phi)
    passed = (
        cancellation <= tol * scale
        and twist <= tol * scale
        and F_prime <= 1e-6 * scale
        and F_norm <= remainder_bound + tol * scale
    )
    return RemainderConjugationReport(
        term_id=term_id,
        support=op.support,
        anchor=anchor,
        a=str(a),
        k=k,
        m=float(m),
        s=float(s),
        remainder_l1=l1,
        cancellation_defect=cancellation,
        F_norm=F_norm,
        F_at_zero=op_norm(_F(phi_c, w, 0.0)),
        F_prime_at_zero=F_prime,
        twist_defect=twist,
        remainder_bound=remainder_bound,
        taylor_bound=taylor_bound,
        passed=passed,
    )
