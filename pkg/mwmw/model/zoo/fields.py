"""Single-site fields: the diagonal ``h σ^z`` and the symmetry breaking ``h σ^x``."""

from __future__ import annotations

from typing import ClassVar, Iterable, Type

from pydantic import BaseModel, Field

from mwmw.algebra.operators import LocalOperator
from mwmw.algebra.spins import SIGMA_X, SIGMA_Z
from mwmw.geometry.lattice import Lattice
from mwmw.model.zoo.base import BaseInteractionBuilder


class FieldParams(BaseModel):
    h: float = Field(default=1.0, description="Field strength")


class FieldZBuilder(BaseInteractionBuilder):
    """Commutes with every multipole generator since each term is diagonal."""

    name: str = "field_z"
    diagonal_symmetric: bool = True

    Params: ClassVar[Type[BaseModel]] = FieldParams

    def terms(self, lattice: Lattice, params: FieldParams) -> Iterable[LocalOperator]:
        for x in range(lattice.n_sites):
            yield LocalOperator.on_site(x, params.h * SIGMA_Z, hermitian=True)


class SymmetryBreakerBuilder(BaseInteractionBuilder):
    name: str = "symmetry_breaker"

    Params: ClassVar[Type[BaseModel]] = FieldParams

    def terms(self, lattice: Lattice, params: FieldParams) -> Iterable[LocalOperator]:
        for x in range(lattice.n_sites):
            yield LocalOperator.on_site(x, params.h * SIGMA_X, hermitian=True)
