"""Configuration schemas: lattice recipes and the run configuration tree."""

from mwmw.schemas.lattice import LatticeSpec
from mwmw.schemas.run_config import (
    ChargeSpec,
    CutoffSpec,
    EntropySpec,
    FFunctionSpec,
    GeometrySpec,
    OutputSpec,
    RunConfig,
    RunSpec,
    SymmetrySpec,
    ToleranceSpec,
)

__all__ = [
    "ChargeSpec",
    "CutoffSpec",
    "EntropySpec",
    "FFunctionSpec",
    "GeometrySpec",
    "LatticeSpec",
    "OutputSpec",
    "RunConfig",
    "RunSpec",
    "SymmetrySpec",
    "ToleranceSpec",
]
