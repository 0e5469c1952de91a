"""Long-range XY couplings ``J |x-y|^{-p} (S+_x S-_y + h.c.)`` for ``|x-y| ≤ max_range``."""

from __future__ import annotations

from typing import Iterable

from pydantic import BaseModel, Field
import numpy as np

from mwmw.algebra.operators import LocalOperator
from mwmw.geometry.lattice import Lattice
from mwmw.model.zoo.base import BaseInteractionBuilder
from mwmw.model.zoo.xy_chain import hopping


class PowerLawXYBuilder(BaseInteractionBuilder):
    name: str = "power_law_xy"
    k_claimed: int = 0

    class Params(BaseModel):
        J: float = Field(default=1.0, description="Amplitude at unit distance")
        p: float = Field(default=12.0, gt=0, description="Decay exponent")
        max_range: float = Field(default=np.inf, gt=0, description="Largest coupled distance")

    def terms(self, lattice: Lattice, params: Params) -> Iterable[LocalOperator]:
        unit = hopping(1.0)
        for x in range(lattice.n_sites):
            d2 = lattice.sq_distances_from([x])[0]
            for y in np.flatnonzero(d2 > 0):
                y = int(y)
                r = float(np.sqrt(d2[y]))
                if y <= x or r > params.max_range:
                    continue
                yield LocalOperator.on_sites((x, y), (2, 2), params.J * r ** (-params.p) * unit, hermitian=True)
