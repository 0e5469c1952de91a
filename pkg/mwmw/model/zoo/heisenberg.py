"""XXZ Heisenberg chain: XY hopping plus ``Jz σ^z σ^z``."""

from __future__ import annotations

from typing import Iterable

from pydantic import BaseModel, Field

from mwmw.algebra.operators import LocalOperator
from mwmw.algebra.spins import SIGMA_Z, kron_all
from mwmw.geometry.lattice import Lattice
from mwmw.model.zoo.base import BaseInteractionBuilder
from mwmw.model.zoo.xy_chain import hopping


class HeisenbergBuilder(BaseInteractionBuilder):
    name: str = "heisenberg"
    k_claimed: int = 0

    class Params(BaseModel):
        J: float = Field(default=1.0, description="Hopping amplitude")
        Jz: float = Field(default=1.0, description="Ising coupling")
        axis: int = Field(default=1, ge=1, description="Bond direction (1-based)")

    def terms(self, lattice: Lattice, params: Params) -> Iterable[LocalOperator]:
        matrix = hopping(params.J) + params.Jz * kron_all(SIGMA_Z, SIGMA_Z)
        for x in range(lattice.n_sites):
            sites = self.chain(lattice, x, params.axis, 2)
            if sites is not None:
                yield LocalOperator.on_sites(sites, (2, 2), matrix, hermitian=True)
