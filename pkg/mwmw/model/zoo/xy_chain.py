"""XY chain ``J (S+_x S-_{x+e} + h.c.)`` along one axis."""

from __future__ import annotations

from typing import Iterable

from pydantic import BaseModel, Field

from mwmw.algebra.operators import LocalOperator
from mwmw.algebra.spins import S_MINUS, S_PLUS, kron_all
from mwmw.geometry.lattice import Lattice
from mwmw.model.zoo.base import BaseInteractionBuilder


def hopping(J: float):
    """Two-site hopping matrix ``J (S+ ⊗ S- + S- ⊗ S+)``."""
    return J * (kron_all(S_PLUS, S_MINUS) + kron_all(S_MINUS, S_PLUS))


class XYChainBuilder(BaseInteractionBuilder):
    name: str = "xy_chain"
    k_claimed: int = 0

    class Params(BaseModel):
        J: float = Field(default=1.0, description="Hopping amplitude")
        axis: int = Field(default=1, ge=1, description="Bond direction (1-based)")

    def terms(self, lattice: Lattice, params: Params) -> Iterable[LocalOperator]:
        matrix = hopping(params.J)
        for x in range(lattice.n_sites):
            sites = self.chain(lattice, x, params.axis, 2)
            if sites is not None:
                yield LocalOperator.on_sites(sites, (2, 2), matrix, hermitian=True)
