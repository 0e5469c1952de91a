"""Abstract base class for builtin interaction builders.

Defines the contract every model in the zoo implements.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple, Type, Union

from pydantic import BaseModel, Field, ValidationError
import numpy as np

from mwmw.algebra.operators import LocalOperator
from mwmw.errors import ConfigError
from mwmw.geometry.lattice import Lattice
from mwmw.model.interaction import Interaction


class BaseInteractionBuilder(ABC, BaseModel):
    """Abstract builder of a named interaction.

    Attributes
    ----------
    name : str
        Registry key.
    k_claimed : int | None
        Symmetry order the model is expected to satisfy.
    diagonal_symmetric : bool
        Every term is diagonal in the charge basis.
    local_dim : int
        Dimension of the single-site Hilbert space the terms act on.

    Notes
    -----
    Subclasses live in modules of :mod:`mwmw.model.zoo`, declare a nested
    pydantic ``Params`` model and implement :meth:`terms`.
    """

    name: str = Field(default="unnamed", description="Registry key.")
    k_claimed: Optional[int] = Field(default=None, description="Claimed symmetry order.")
    diagonal_symmetric: bool = Field(default=False, description="Terms are diagonal in the charge basis.")
    local_dim: int = Field(default=2, ge=2, description="Single-site Hilbert space dimension.")

    class Params(BaseModel):
        pass

    @abstractmethod
    def terms(self, lattice: Lattice, params: BaseModel) -> Iterable[LocalOperator]:
        """Yield the local terms of the model on ``lattice``."""

    def get_input_schema(self) -> Type[BaseModel]:
        return self.Params

    def parse_params(self, params: Union[BaseModel, Mapping[str, Any], None]) -> BaseModel:
        if isinstance(params, self.Params):
            return params
        try:
            return self.Params(**dict(params or {}))
        except ValidationError as exc:
            raise ConfigError(f"invalid parameters for {self.name}: {exc}") from exc

    def build(
        self,
        lattice: Lattice,
        params: Union[BaseModel, Mapping[str, Any], None] = None,
        index_set_I: Tuple[int, ...] = (),
    ) -> Interaction:
        """Build the interaction; raises ``ValueError`` when no term fits on the lattice."""
        parsed = self.parse_params(params)
        ops: List[LocalOperator] = list(self.terms(lattice, parsed))
        if not ops:
            raise ValueError(f"lattice too small for the footprint of {self.name}")
        numeric: Dict[str, float] = {k: float(v) for k, v in parsed.model_dump().items() if isinstance(v, (int, float))}
        return Interaction.from_terms(
            lattice,
            ops,
            name=self.name,
            k_claimed=self.k_claimed,
            index_set_I=tuple(index_set_I),
            diagonal_symmetric=self.diagonal_symmetric,
            params=numeric,
        )

    @staticmethod
    def chain(lattice: Lattice, site: int, axis: int, length: int) -> Optional[List[int]]:
        """Sites ``x, x+e, ..., x+(length-1)e`` along the 1-based ``axis``, or ``None`` if one is missing."""
        if not 1 <= axis <= lattice.dim_ambient:
            raise ConfigError(f"axis {axis} outside 1..{lattice.dim_ambient}")
        base = np.array(lattice.points[site])
        out = [site]
        for step in range(1, length):
            point = base.copy()
            point[axis - 1] += step
            idx = lattice.site_lookup.get(tuple(float(c) for c in point))
            if idx is None:
                return None
            out.append(idx)
        return out
