"""Multipole generators, truncated unitaries and the symmetry action ``τ_s``.

Conventions: ``G^{(a)} = Σ_x w_x n_x`` with ``w_x = x^a`` (full) or
``w_x = χ_m(x) x^a`` (truncated), ``U = exp(i s G)`` and
``τ_s(A) = U† A U = e^{-isG} A e^{isG}``. Only charges whose support meets
``supp A`` act nontrivially on ``A``, so ``τ_s`` is computed on the collar of
``supp A``.
"""

from __future__ import annotations

import math
from typing import Any, Dict, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse
import numpy as np

from mwmw.algebra.linalg import conjugate_unitary, hermitian_exp, unitarity_defect
from mwmw.algebra.operators import LocalOperator, Volume, embed, embed_diagonal
from mwmw.configs.settings import app_config
from mwmw.cutoff.profile import CutoffProfile, cutoff_weights
from mwmw.errors import PreconditionError, ResourceLimitError, SupportError, VolumeTooSmallError
from mwmw.geometry.lattice import box_sites
from mwmw.model.charges import ChargeFamily
from mwmw.symmetry.multiindex import MultiIndex


MultiIndexLike = Union[MultiIndex, str, Sequence[int]]


def _index_for(cf: ChargeFamily, a: MultiIndexLike) -> MultiIndex:
    a = MultiIndex.of(a)
    if a.d != cf.lattice.dim_ambient:
        raise PreconditionError(f"multi-index {a} has {a.d} entries, lattice dimension is {cf.lattice.dim_ambient}")
    return a


def weighted_charge_sum(cf: ChargeFamily, weights: Dict[int, float], V: Volume) -> LocalOperator:
    """``Σ_x w_x n_x`` on ``V``; stored as a sparse diagonal when every charge is onsite and diagonal."""
    for x in weights:
        if not V.contains(cf.charges[x].support):
            raise SupportError(f"charge at site {x} is not supported inside the volume")
    if cf.onsite_diagonal:
        if V.total_dim > app_config.SPARSE_LIMIT:
            raise ResourceLimitError(f"volume dimension {V.total_dim} exceeds limit {app_config.SPARSE_LIMIT}")
        diagonal = np.zeros(V.total_dim)
        for x, w in weights.items():
            if w != 0.0:
                n = cf.charges[x]
                diagonal += w * embed_diagonal(np.real(np.diagonal(n.dense())), n.support, V)
        matrix = sparse.diags(diagonal, format="csr")
    else:
        matrix = np.zeros((V.total_dim, V.total_dim), dtype=complex)
        for x, w in weights.items():
            if w != 0.0:
                matrix += w * embed(cf.charges[x], V)
    return LocalOperator(support=V.sites, dims=V.dims, matrix=matrix, hermitian=True)


def generator_diagonal(G: LocalOperator) -> Optional[np.ndarray]:
    """Real diagonal of ``G`` when ``G`` is diagonal, else ``None``."""
    if not G.is_diagonal():
        return None
    return np.real(G.matrix.diagonal() if G.is_sparse else np.diagonal(G.matrix))


def q_sites(cf: ChargeFamily, m: float) -> Tuple[int, ...]:
    """``Q_m``: union of ``supp(n_x)`` over lattice points with ``|x|_∞ ≤ 2m``."""
    return cf.support_of(box_sites(cf.lattice, 2.0 * m))


def truncated_weights(
    cf: ChargeFamily, profile: CutoffProfile, a: MultiIndexLike, m: float, positions: Optional[Sequence[int]] = None
) -> Dict[int, float]:
    """Nonzero weights ``χ_m(x) x^a``, over ``positions`` (default all charges in the ``2m`` box)."""
    a = _index_for(cf, a)
    if positions is None:
        positions = box_sites(cf.lattice, 2.0 * m)
    positions = [x for x in positions if x in cf.charges]
    if not positions:
        return {}
    values = cutoff_weights(profile, m, a, cf.lattice.coords[positions])
    return {x: float(w) for x, w in zip(positions, values) if w != 0.0}


def full_weights(cf: ChargeFamily, a: MultiIndexLike, positions: Sequence[int]) -> Dict[int, float]:
    """Untruncated weights ``x^a``."""
    a = _index_for(cf, a)
    positions = [x for x in positions if x in cf.charges]
    if not positions:
        return {}
    values = a.monomial(cf.lattice.coords[positions])
    return {x: float(w) for x, w in zip(positions, values)}


def build_generator(
    cf: ChargeFamily,
    profile: Optional[CutoffProfile],
    a: MultiIndexLike,
    m: Optional[float],
    V: Volume,
    truncate: bool = True,
) -> LocalOperator:
    """Multipole generator on a finite volume.

    With ``truncate`` the generator is ``Σ_x χ_m(x) x^a n_x`` and ``V`` must
    contain ``Q_m``. Without it the weights are ``x^a`` for every charge whose
    support meets ``V``, and the result lives on the collar of ``V``.

    Raises
    ------
    VolumeTooSmallError
        If ``V`` does not contain ``Q_m`` (truncated mode).
    """
    if truncate:
        if profile is None or m is None:
            raise PreconditionError("the truncated generator needs a cutoff profile and m")
        Qm = q_sites(cf, m)
        if not V.contains(Qm):
            missing = sorted(set(Qm) - set(V.sites))
            raise VolumeTooSmallError(f"volume misses {len(missing)} sites of Q_m (m = {m:g})", required_sites=Qm)
        return weighted_charge_sum(cf, truncated_weights(cf, profile, a, m), V)
    positions = cf.charges_touching(V.sites)
    return weighted_charge_sum(cf, full_weights(cf, a, positions), cf.volume(cf.collar(V.sites)))


def collar_generator(cf: ChargeFamily, a: MultiIndexLike, support: Sequence[int]) -> LocalOperator:
    """``Σ_{x: supp(n_x) ∩ Λ ≠ ∅} x^a n_x`` on the collar of ``Λ``."""
    positions = cf.charges_touching(support)
    return weighted_charge_sum(cf, full_weights(cf, a, positions), cf.volume(cf.collar(support)))


def phase_unitary(G: LocalOperator, s: float) -> np.ndarray:
    """``exp(isG)``; a 1-D array of phases when ``G`` is diagonal."""
    diagonal = generator_diagonal(G)
    if diagonal is not None:
        return np.exp(1j * s * diagonal)
    return hermitian_exp(G.dense(), 1j * s)


def dagger_conjugate(U: np.ndarray, A: np.ndarray) -> np.ndarray:
    """``U† A U`` for a full or diagonal unitary."""
    if U.ndim == 1:
        return conjugate_unitary(U.conj(), A, check=False)
    return conjugate_unitary(U.conj().T, A, check=False)


class TruncatedUnitary(BaseModel):
    """``U_m^{(a)}(s) = exp(i s Σ_x χ_m(x) x^a n_x)`` on a volume containing ``Q_m``.

    Attributes
    ----------
    a : MultiIndex
    s : float
    m : float
    generator : LocalOperator
        Truncated generator on ``volume``.
    unitary : numpy.ndarray
        ``exp(isG)``; 1-D (the diagonal) when the generator is diagonal.
    Q_m : tuple of int
        Sites on which ``U`` can act nontrivially.
    volume : Volume
    """

    a: MultiIndex
    s: float
    m: float
    generator: LocalOperator
    unitary: Any = Field(description="exp(isG), as a diagonal when G is diagonal.")
    Q_m: Tuple[int, ...]
    volume: Volume
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def is_diagonal(self) -> bool:
        return np.ndim(self.unitary) == 1

    def matrix(self) -> np.ndarray:
        return np.diag(self.unitary) if self.is_diagonal else np.asarray(self.unitary)

    def defect(self) -> float:
        return unitarity_defect(self.unitary)

    def conjugate(self, A: LocalOperator) -> LocalOperator:
        """``U† A U`` with ``A`` embedded into the volume."""
        matrix = dagger_conjugate(self.unitary, embed(A, self.volume))
        return LocalOperator(support=self.volume.sites, dims=self.volume.dims, matrix=matrix, hermitian=A.hermitian)


def build_truncated_unitary(
    cf: ChargeFamily, profile: CutoffProfile, a: MultiIndexLike, s: float, m: float, V: Volume
) -> TruncatedUnitary:
    """``exp(isG)`` for the truncated generator; a single qubit with weight ``w`` gives ``diag(e^{isw}, 1)``."""
    a = _index_for(cf, a)
    G = build_generator(cf, profile, a, m, V, truncate=True)
    return TruncatedUnitary(
        a=a, s=float(s), m=float(m), generator=G, unitary=phase_unitary(G, s), Q_m=q_sites(cf, m), volume=V
    )


def truncated_conjugation(
    A: LocalOperator, cf: ChargeFamily, profile: CutoffProfile, a: MultiIndexLike, s: float, m: float
) -> LocalOperator:
    """``U_m† A U_m`` computed on the collar of ``supp A``."""
    collar = cf.collar(A.support)
    weights = truncated_weights(cf, profile, a, m, positions=cf.charges_touching(A.support))
    G = weighted_charge_sum(cf, weights, cf.volume(collar))
    volume = G.volume
    matrix = dagger_conjugate(phase_unitary(G, s), embed(A, volume))
    return LocalOperator(support=volume.sites, dims=volume.dims, matrix=matrix, hermitian=A.hermitian)


def apply_tau(
    A: LocalOperator, cf: ChargeFamily, a: MultiIndexLike, s: float, V: Optional[Volume] = None
) -> LocalOperator:
    """Untruncated action ``τ_s^{(a)}(A)``; the result lives on the collar of ``supp A``.

    Raises
    ------
    SupportError
        If ``V`` is given and does not contain the collar.
    """
    collar = cf.collar(A.support)
    if V is not None and not V.contains(collar):
        raise SupportError(f"collar of {A.support} exceeds the working volume")
    G = collar_generator(cf, a, A.support)
    volume = G.volume
    matrix = dagger_conjugate(phase_unitary(G, s), embed(A, volume))
    return LocalOperator(support=volume.sites, dims=volume.dims, matrix=matrix, hermitian=A.hermitian)


def plateau_m(cf: ChargeFamily, sites: Sequence[int]) -> int:
    """Smallest integer ``m`` with ``χ_m = 1`` on every charge touching ``sites``."""
    touching = cf.charges_touching(sites)
    if not touching:
        return 1
    radius = float(np.max(np.abs(cf.lattice.coords[list(touching)])))
    return max(1, math.ceil(radius))
