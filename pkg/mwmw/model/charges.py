"""Local charge families ``{n_x}`` and their verification."""

from __future__ import annotations

import itertools
import logging
from functools import cached_property
from typing import Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
import numpy as np

from mwmw.algebra.linalg import commutator, op_norm
from mwmw.algebra.operators import LocalOperator, Volume, embed
from mwmw.geometry.lattice import Lattice


ChargeKind = Literal["spin_z_half", "boson_number"]


class ChargeFamily(BaseModel):
    """Self-adjoint charges ``n_x`` indexed by lattice sites.

    Attributes
    ----------
    lattice : Lattice
        Lattice the family lives on.
    charges : dict[int, LocalOperator]
        Charge operator for each site index.
    N0 : float
        Declared bound ``‖n_x‖ ≤ N0``.
    R0 : float
        Declared radius with ``supp(n_x) ⊆ B_{R0}(x)``.
    """

    lattice: Lattice = Field(description="Lattice the family lives on.")
    charges: Dict[int, LocalOperator] = Field(description="Charge operator of each site index.")
    N0: float = Field(ge=0, description="Declared norm bound.")
    R0: float = Field(ge=0, description="Declared support radius.")
    kind: str = Field(default="custom", description="Builtin name or 'custom'.")
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check(self) -> "ChargeFamily":
        for x, n in self.charges.items():
            if not 0 <= x < self.lattice.n_sites:
                raise ValueError(f"charge index {x} is not a lattice site")
            if not n.hermitian:
                raise ValueError(f"charge at site {x} must be flagged Hermitian")
        return self

    @cached_property
    def touching_index(self) -> Dict[int, Tuple[int, ...]]:
        """Map site ``y`` to the charge positions ``x`` with ``y ∈ supp(n_x)``."""
        index: Dict[int, List[int]] = {}
        for x in sorted(self.charges):
            for y in self.charges[x].support:
                index.setdefault(y, []).append(x)
        return {y: tuple(xs) for y, xs in index.items()}

    @cached_property
    def site_dims(self) -> Dict[int, int]:
        dims: Dict[int, int] = {}
        for n in self.charges.values():
            dims.update(n.site_dims)
        return dims

    @cached_property
    def onsite_diagonal(self) -> bool:
        """All charges are single-site and diagonal."""
        return all(n.support == (x,) and n.is_diagonal() for x, n in self.charges.items())

    def charges_touching(self, support: Sequence[int]) -> Tuple[int, ...]:
        """Positions ``x`` with ``supp(n_x) ∩ support ≠ ∅``, ascending."""
        found = set()
        for y in support:
            found.update(self.touching_index.get(y, ()))
        return tuple(sorted(found))

    def collar(self, support: Sequence[int]) -> Tuple[int, ...]:
        """``support`` together with the supports of every charge touching it."""
        sites = set(support)
        for x in self.charges_touching(support):
            sites.update(self.charges[x].support)
        return tuple(sorted(sites))

    def support_of(self, positions: Sequence[int]) -> Tuple[int, ...]:
        """Union of ``supp(n_x)`` over ``positions``."""
        sites = set()
        for x in positions:
            if x in self.charges:
                sites.update(self.charges[x].support)
        return tuple(sorted(sites))

    def volume(self, sites: Sequence[int]) -> Volume:
        return Volume.from_sites(sites, self.site_dims)


def builtin_charges(kind: ChargeKind, lattice: Lattice, cutoff: Optional[int] = None) -> ChargeFamily:
    """Onsite charge family on every lattice site.

    ``spin_z_half`` uses ``n = diag(1, 0)`` with ``N0 = 1``; ``boson_number``
    uses ``n = diag(0, ..., cutoff)`` with ``N0 = cutoff``. Both record
    ``R0 = 0.5`` so that ``B_{R0}(x) ∩ L = {x}`` on integer lattices.
    """
    if kind == "spin_z_half":
        local = np.diag([1.0, 0.0]).astype(complex)
        N0 = 1.0
    elif kind == "boson_number":
        if cutoff is None or cutoff < 1:
            raise ValueError("boson_number requires cutoff >= 1")
        local = np.diag(np.arange(cutoff + 1, dtype=float)).astype(complex)
        N0 = float(cutoff)
    else:
        raise ValueError(f"unknown charge kind: {kind!r}")
    charges = {x: LocalOperator.on_site(x, local, hermitian=True) for x in range(lattice.n_sites)}
    return ChargeFamily(lattice=lattice, charges=charges, N0=N0, R0=0.5, kind=kind)


class ChargeViolation(BaseModel):
    site: int
    value: float
    bound: float


class CommutatorViolation(BaseModel):
    x: int
    y: int
    norm: float


class ChargeFamilyReport(BaseModel):
    """Outcome of :func:`verify_charge_family`; violations are listed, never raised."""

    passed: bool
    n_charges: int
    N0: float
    R0: float
    checked_pairs: int = Field(description="Pairs with overlapping supports whose commutator was computed.")
    norm_violations: List[ChargeViolation] = Field(default_factory=list)
    support_violations: List[ChargeViolation] = Field(default_factory=list)
    commutator_violations: List[CommutatorViolation] = Field(default_factory=list)


def verify_charge_family(cf: ChargeFamily, lat: Optional[Lattice] = None, tol: float = 1e-12) -> ChargeFamilyReport:
    """Check the three charge-family conditions exhaustively.

    Norms against ``N0``, supports against the open ball ``B_{R0}(x)``, and
    commutators for every pair of charges with overlapping supports (these are
    the only pairs that can fail to commute, all of them lie within ``2·R0``).
    """
    lat = cf.lattice if lat is None else lat
    norm_violations: List[ChargeViolation] = []
    support_violations: List[ChargeViolation] = []
    norms: Dict[int, float] = {}
    for x in sorted(cf.charges):
        n = cf.charges[x]
        norms[x] = op_norm(n.dense())
        if norms[x] > cf.N0 + tol:
            norm_violations.append(ChargeViolation(site=x, value=norms[x], bound=cf.N0))
        for y in n.support:
            dist = lat.distance(x, y)
            if not dist < cf.R0:
                support_violations.append(ChargeViolation(site=x, value=dist, bound=cf.R0))

    pairs = set()
    for xs in cf.touching_index.values():
        pairs.update(itertools.combinations(xs, 2))
    commutator_violations: List[CommutatorViolation] = []
    for x, y in sorted(pairs):
        nx, ny = cf.charges[x], cf.charges[y]
        volume = cf.volume(set(nx.support) | set(ny.support))
        value = op_norm(commutator(embed(nx, volume), embed(ny, volume)))
        if value > tol * max(1.0, norms[x] * norms[y]):
            commutator_violations.append(CommutatorViolation(x=x, y=y, norm=value))

    passed = not (norm_violations or support_violations or commutator_violations)
    if not passed:
        logging.info(
            "Charge family violations: %d norm, %d support, %d commutator",
            len(norm_violations),
            len(support_violations),
            len(commutator_violations),
        )
    return ChargeFamilyReport(
        passed=passed,
        n_charges=len(cf.charges),
        N0=cf.N0,
        R0=cf.R0,
        checked_pairs=len(pairs),
        norm_violations=norm_violations,
        support_violations=support_violations,
        commutator_violations=commutator_violations,
    )
