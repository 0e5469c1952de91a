"""Dipole-conserving ring exchange ``J (S+_x S-_{x+1} S-_{x+2} S+_{x+3} + h.c.)``.

The charge change ``(+1, -1, -1, +1)`` keeps both the total charge and the
dipole moment along the hopping axis fixed.
"""

from __future__ import annotations

from typing import Iterable

from pydantic import BaseModel, Field

from mwmw.algebra.operators import LocalOperator
from mwmw.algebra.spins import S_MINUS, S_PLUS, kron_all
from mwmw.geometry.lattice import Lattice
from mwmw.model.zoo.base import BaseInteractionBuilder


class DipoleHop4Builder(BaseInteractionBuilder):
    name: str = "dipole_hop4"
    k_claimed: int = 1

    class Params(BaseModel):
        J: float = Field(default=1.0, description="Ring-exchange amplitude")
        axis: int = Field(default=1, ge=1, description="Hopping direction (1-based)")

    def terms(self, lattice: Lattice, params: Params) -> Iterable[LocalOperator]:
        move = kron_all(S_PLUS, S_MINUS, S_MINUS, S_PLUS)
        matrix = params.J * (move + move.conj().T)
        for x in range(lattice.n_sites):
            sites = self.chain(lattice, x, params.axis, 4)
            if sites is not None:
                yield LocalOperator.on_sites(sites, (2, 2, 2, 2), matrix, hermitian=True)
