"""Surface energies ``h_m``, the twisted derivations ``D_m`` and the closed-form bound.

``D_m = U h_m U† − h_m + U† h_m U − h_m`` with ``U = U_m^{(a)}(s)``. Only terms
meeting ``Q_m`` contribute, and each of them only feels the charges touching
its support, so the per-term evaluation works on collars and scales to any
``m``. The exact evaluation builds the full operator on a volume containing
``Q_m`` and every term touching it.
"""

from __future__ import annotations

import logging
import math
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse
import numpy as np

from mwmw.algebra.linalg import conjugate_unitary, op_norm, op_norm_sparse
from mwmw.algebra.operators import LocalOperator, Volume, embed, local_sum
from mwmw.configs.settings import app_config
from mwmw.cutoff.profile import CutoffProfile
from mwmw.errors import PreconditionError, VolumeTooSmallError
from mwmw.geometry.lattice import box_sites
from mwmw.model.charges import ChargeFamily
from mwmw.model.interaction import Interaction, surface_energy
from mwmw.symmetry.multiindex import MultiIndex
from mwmw.symmetry.unitary import (
    MultiIndexLike,
    build_generator,
    dagger_conjugate,
    generator_diagonal,
    phase_unitary,
    q_sites,
    truncated_weights,
    weighted_charge_sum,
)


DmMode = Literal["exact", "per_term"]


def compute_Qm(cf: ChargeFamily, m: float) -> Tuple[int, ...]:
    """``Q_m = ∪ supp(n_x)`` over lattice points with ``|x|_∞ ≤ 2m``."""
    return q_sites(cf, m)


def required_sites(phi: Interaction, cf: ChargeFamily, m: float) -> Tuple[int, ...]:
    """``Q_m`` together with the supports of all terms meeting it."""
    sites = set(compute_Qm(cf, m))
    for i in phi.terms_meeting(sites):
        sites.update(phi.terms[i].support)
    return tuple(sorted(sites))


def sweep_volume(phi: Interaction, cf: ChargeFamily, m: float) -> Volume:
    """Box of half width ``2m + R0 + range`` (clipped to the lattice); it holds ``Q_m`` and every touching term."""
    sites = box_sites(cf.lattice, 2.0 * m, margin=cf.R0 + phi.range)
    site_dims = {**cf.site_dims, **phi.site_dims}
    return Volume.from_sites(sites, site_dims)


def compute_hm(
    phi: Interaction, cf: ChargeFamily, m: float, V: Volume, as_sparse: bool = False
) -> LocalOperator:
    """``h_m = Σ_{Λ ∩ Q_m ≠ ∅} φ(Λ)`` on ``V``.

    Raises
    ------
    VolumeTooSmallError
        If ``V`` misses a site of ``Q_m`` or of a term touching it; the
        exception carries the required site set.

    Examples
    --------
    An xy chain on ``{-8..8}`` with ``m = 1`` has ``Q_1 = {-2..2}`` and the six
    bonds from ``{-3,-2}`` to ``{2,3}`` contribute.
    """
    needed = required_sites(phi, cf, m)
    if not V.contains(needed):
        missing = sorted(set(needed) - set(V.sites))
        raise VolumeTooSmallError(
            f"volume misses {len(missing)} sites needed for h_m at m = {m:g}", required_sites=needed
        )
    Qm = compute_Qm(cf, m)
    if not as_sparse:
        return surface_energy(phi, Qm, V)
    return local_sum([phi.terms[i] for i in phi.terms_meeting(Qm)], V, as_sparse=True)


def _twist_factor(g: np.ndarray, rows: np.ndarray, cols: np.ndarray, s: float) -> np.ndarray:
    """Entry factor ``2 cos(s (g_i − g_j)) − 2`` of ``D`` for a diagonal generator."""
    return 2.0 * np.cos(s * (g[rows] - g[cols])) - 2.0


def twisted_difference(A: np.ndarray, U: np.ndarray) -> np.ndarray:
    """``U A U† − A + U† A U − A`` for a full or diagonal unitary."""
    return conjugate_unitary(U, A, check=False) + dagger_conjugate(U, A) - 2.0 * A


def term_twist(
    term: LocalOperator, cf: ChargeFamily, profile: CutoffProfile, a: MultiIndexLike, s: float, m: float
) -> LocalOperator:
    """``U φ U† − φ + U† φ U − φ`` for a single term, on the collar of its support."""
    weights = truncated_weights(cf, profile, a, m, positions=cf.charges_touching(term.support))
    G = weighted_charge_sum(cf, weights, cf.volume(cf.collar(term.support)))
    phi_c = embed(term, G.volume)
    g = generator_diagonal(G)
    if g is not None:
        rows, cols = np.indices(phi_c.shape)
        matrix = phi_c * _twist_factor(g, rows, cols, s)
    else:
        matrix = twisted_difference(phi_c, phase_unitary(G, s))
    return LocalOperator(support=G.volume.sites, dims=G.volume.dims, matrix=matrix, hermitian=True)


class DmResult(BaseModel):
    """Norm of ``D_m`` in one evaluation mode.

    Attributes
    ----------
    norm : float | None
        ``‖D_m‖`` (exact) or ``Σ_Λ ‖D_Λ‖`` (per_term); ``None`` when the
        volume is beyond the sparse limit.
    lower, upper : float | None
        Certified bracket of the exact norm (equal to ``norm`` for dense evaluations).
    per_term : list of float
        ``‖D_Λ‖`` for the terms in ``term_ids`` (per_term mode).
    """

    mode: DmMode
    m: float
    Qm_size: int
    norm: Optional[float] = None
    lower: Optional[float] = None
    upper: Optional[float] = None
    method: str = Field(description="dense, eigsh, zero, collar or skipped.")
    n_terms: int = Field(description="Terms meeting Q_m.")
    term_ids: List[int] = Field(default_factory=list)
    per_term: List[float] = Field(default_factory=list)
    volume_dim: Optional[int] = None
    operator: Optional[LocalOperator] = Field(default=None, description="Dense D_m when it was formed.")
    note: str = ""
    model_config = ConfigDict(arbitrary_types_allowed=True)


def _dm_per_term(
    phi: Interaction, cf: ChargeFamily, profile: CutoffProfile, a: MultiIndex, s: float, m: float
) -> DmResult:
    Qm = compute_Qm(cf, m)
    ids = list(phi.terms_meeting(Qm))
    norms = [term_twist(phi.terms[i], cf, profile, a, s, m).norm() for i in ids]
    return DmResult(
        mode="per_term",
        m=m,
        Qm_size=len(Qm),
        norm=math.fsum(norms),
        method="collar",
        n_terms=len(ids),
        term_ids=ids,
        per_term=norms,
    )


def _dm_exact(
    phi: Interaction,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndex,
    s: float,
    m: float,
    V: Volume,
) -> DmResult:
    Qm = compute_Qm(cf, m)
    n_terms = len(phi.terms_meeting(Qm))
    base = dict(mode="exact", m=m, Qm_size=len(Qm), n_terms=n_terms, volume_dim=V.total_dim)
    dense = V.total_dim <= app_config.DENSE_LIMIT
    if not dense and not (cf.onsite_diagonal and V.total_dim <= app_config.SPARSE_LIMIT):
        logging.info("Exact D_m skipped at m=%g: volume dimension %d", m, V.total_dim)
        return DmResult(**base, method="skipped", note=f"volume dimension {V.total_dim} beyond exact limits")

    h = compute_hm(phi, cf, m, V, as_sparse=not dense)
    G = build_generator(cf, profile, a, m, V, truncate=True)
    g = generator_diagonal(G)
    if dense:
        hd = h.dense()
        if g is not None:
            rows, cols = np.indices(hd.shape)
            D = hd * _twist_factor(g, rows, cols, s)
        else:
            D = twisted_difference(hd, phase_unitary(G, s))
        value = op_norm(D)
        op = LocalOperator(support=V.sites, dims=V.dims, matrix=D, hermitian=True)
        return DmResult(**base, norm=value, lower=value, upper=value, method="dense", operator=op)

    coo = sparse.coo_matrix(h.matrix)
    D = sparse.csr_matrix((coo.data * _twist_factor(g, coo.row, coo.col, s), (coo.row, coo.col)), shape=coo.shape)
    D.eliminate_zeros()
    estimate = op_norm_sparse(D, hermitian=True)
    note = "" if estimate.converged else "iterative solver did not converge"
    return DmResult(
        **base, norm=estimate.value, lower=estimate.lower, upper=estimate.upper, method=estimate.method, note=note
    )


def compute_Dm(
    phi: Interaction,
    cf: ChargeFamily,
    profile: CutoffProfile,
    a: MultiIndexLike,
    s: float,
    m: float,
    V: Optional[Volume] = None,
    mode: DmMode = "exact",
) -> DmResult:
    """Evaluate ``D_m`` exactly or through the per-term triangle sum.

    Parameters
    ----------
    phi : Interaction
    cf : ChargeFamily
    profile : CutoffProfile
    a : multi-index
    s : float
        Symmetry parameter.
    m : float
        Truncation scale.
    V : Volume, optional
        Working volume of the exact mode; defaults to :func:`sweep_volume`.
    mode : {"exact", "per_term"}
        ``exact`` forms the operator (dense up to ``DENSE_LIMIT``, sparse with
        an ARPACK norm up to ``SPARSE_LIMIT`` for diagonal charges, skipped
        beyond). ``per_term`` sums ``‖U φ(Λ) U† − φ(Λ) + U† φ(Λ) U − φ(Λ)‖``
        over the terms meeting ``Q_m`` using only their collars.

    Returns
    -------
    DmResult

    Raises
    ------
    VolumeTooSmallError
        In exact mode, if ``V`` does not hold ``Q_m`` and its touching terms.
    """
    a = MultiIndex.of(a)
    if mode == "per_term":
        return _dm_per_term(phi, cf, profile, a, s, m)
    if mode != "exact":
        raise ValueError(f"unknown D_m mode: {mode!r}")
    V = V if V is not None else sweep_volume(phi, cf, m)
    return _dm_exact(phi, cf, profile, a, s, m, V)


def geometric_factor(Qm_size: int, m: float, k: int, a_order: int) -> float:
    """``|Q_m| / m^{2(k − |a| + 1)}``; bounded in ``m`` when ``γ ≤ 2(k − |a| + 1)``."""
    return float(Qm_size) / float(m) ** (2 * (k - a_order + 1))


def rhs_bound(
    a: MultiIndexLike, k: int, s: float, C_a: float, N0: float, m: float, Qm_size: int, decay_sup: float
) -> float:
    """``4 s² C_a² N0² |Q_m| / m^{2(k−|a|+1)} · decay_sup``.

    Raises
    ------
    PreconditionError
        If ``|a| > k``.

    Examples
    --------
    >>> rhs_bound((0,), 1, 0.0, 3.0, 1.0, 2, 9, 464.0)
    0.0
    """
    order = MultiIndex.of(a).order
    if order > k:
        raise PreconditionError(f"|a| = {order} must not exceed k = {k}")
    return 4.0 * s**2 * C_a**2 * N0**2 * geometric_factor(Qm_size, m, k, order) * decay_sup

