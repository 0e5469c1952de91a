"""Run configuration consumed by every CLI subcommand.

A configuration is a single JSON document; every section is a pydantic model
and cross-references (multi-index lengths, invariance axes) are resolved by
:class:`RunConfig` itself, so a configuration that validates can be run.
"""

from __future__ import annotations

from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
import numpy as np

from mwmw.model.io import InteractionSpec
from mwmw.schemas.lattice import LatticeSpec


class ChargeSpec(BaseModel):
    kind: Literal["spin_z_half", "boson_number"] = Field(default="spin_z_half", description="Builtin charge family")
    cutoff: Optional[int] = Field(default=None, ge=1, description="Boson occupation cutoff")

    @model_validator(mode="after")
    def _cutoff_for_bosons(self) -> "ChargeSpec":
        if self.kind == "boson_number" and self.cutoff is None:
            raise ValueError("boson_number charges need a cutoff")
        return self

    @property
    def local_dim(self) -> int:
        return 2 if self.kind == "spin_z_half" else int(self.cutoff) + 1


class SymmetrySpec(BaseModel):
    """Claimed symmetry order, the multi-indices to test and the invariance axes.

    An empty ``a`` means every multi-index of ``T_k``.
    """

    k: Optional[int] = Field(default=None, ge=0, description="Symmetry order; defaults to the interaction's claim")
    a: List[List[int]] = Field(default_factory=list, description="Multi-indices, one entry per axis")
    I: List[int] = Field(default_factory=list, description="1-based axes whose index stays zero")

    @field_validator("a")
    @classmethod
    def _nonnegative(cls, value: List[List[int]]) -> List[List[int]]:
        for a in value:
            if not a or any(v < 0 for v in a):
                raise ValueError(f"multi-index entries must be nonnegative and non-empty: {a}")
        return value


class CutoffSpec(BaseModel):
    derivative_order_max: int = Field(default=2, ge=1, description="Highest derivative order in use")
    grid_resolution: Optional[int] = Field(default=None, ge=2, description="Points per unit for grid suprema")
    safety: Optional[float] = Field(default=None, ge=1.0, description="Multiplier of grid suprema")


class ToleranceSpec(BaseModel):
    charge: float = Field(default=1e-12, gt=0, description="Charge commutators and norms")
    symmetry: float = Field(default=1e-12, gt=0, description="Term commutators with the generators")
    generators: float = Field(default=1e-10, gt=0, description="Generator commutators")
    slab: float = Field(default=1e-12, gt=0, description="Vanishing slab derivatives")
    equality: float = Field(default=1e-8, gt=0, description="Relative tolerance of S_fwd + S_bwd = beta Tr(rho D_m)")
    triangle_slack: float = Field(default=1e-9, gt=0, description="Slack of Dm_norm_exact <= Dm_norm_triangle")


class RunSpec(BaseModel):
    """Parameters of an ``m``-sweep.

    ``m_range`` is ``[start, stop]`` or ``[start, stop, step]`` with ``stop``
    included; ``m_values`` lists the values explicitly and wins when both are set.
    """

    beta: Optional[float] = Field(default=None, ge=0, description="Inverse temperature of the entropy columns")
    s: float = Field(default=1.0, description="Group parameter")
    m_values: Optional[List[float]] = Field(default=None, description="Explicit cutoff scales")
    m_range: Optional[List[float]] = Field(default=None, min_length=2, max_length=3, description="Inclusive range")
    modes: List[Literal["exact", "triangle", "entropy"]] = Field(default_factory=lambda: ["exact", "triangle"])
    exact_max_m: Optional[float] = Field(default=None, gt=0, description="Skip exact D_m above this m")
    threshold: float = Field(default=0.05, gt=0, description="Largest growth exponent judged bounded")
    burn_in: Optional[float] = Field(default=None, gt=0, description="Fit the exponent on m >= burn_in")
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)

    @model_validator(mode="after")
    def _check(self) -> "RunSpec":
        if self.m_range is not None:
            step = self.m_range[2] if len(self.m_range) == 3 else 1.0
            if step <= 0 or self.m_range[1] < self.m_range[0]:
                raise ValueError(f"m_range {self.m_range} is empty")
        if any(m <= 0 for m in self.resolved_m()):
            raise ValueError("cutoff scales m must be positive")
        if "entropy" in self.modes and self.beta is None:
            raise ValueError("entropy mode needs beta")
        return self

    def resolved_m(self) -> List[float]:
        if self.m_values is not None:
            return sorted(float(m) for m in self.m_values)
        if self.m_range is None:
            return []
        start, stop = self.m_range[0], self.m_range[1]
        step = self.m_range[2] if len(self.m_range) == 3 else 1.0
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [float(start + i * step) for i in range(n)]


class GeometrySpec(BaseModel):
    C: Optional[float] = Field(default=None, gt=0, description="Claimed prefactor; defaults to the lattice record")
    gamma: Optional[float] = Field(default=None, gt=0, description="Claimed growth exponent")
    r0: float = Field(default=1.0, gt=0, description="Smallest radius of the growth bound")
    r_grid: List[float] = Field(default_factory=lambda: [1.0, 2.0, 3.0, 4.0, 5.0], min_length=1)


class FFunctionSpec(BaseModel):
    lam: float = Field(gt=0, description="Power-law exponent of F(r) = (1 + r)^-lam")
    d: int = Field(default=1, ge=1, description="Dimension of the truncated boxes")
    truncations: List[int] = Field(default_factory=lambda: [100], min_length=1, description="Half extents")
    growth_tol: float = Field(default=0.01, gt=0, description="Relative norm growth flagged as divergence")
    convolution_sites: int = Field(default=1500, ge=1, description="Sites entering the convolution constant")


class EntropySpec(BaseModel):
    """Seeded random instances of the finite-volume identities; ``seed`` is mandatory."""

    seed: int = Field(description="Base seed; instance i uses seed + i")
    n_instances: int = Field(default=100, ge=0)
    n_qubits: int = Field(default=3, ge=1)
    betas: List[float] = Field(default_factory=lambda: [0.3, 1.0, 3.0], min_length=1)
    kms_pairs: int = Field(default=50, ge=0)
    uhlmann_pairs: int = Field(default=50, ge=0)
    uhlmann_qubits: int = Field(default=4, ge=2)
    uhlmann_kept: int = Field(default=2, ge=1)
    tracial_samples: int = Field(default=20, ge=0)
    tracial_a: List[List[int]] = Field(default_factory=list, description="Empty means orders 0..2 on axis 1")
    tracial_s: List[float] = Field(default_factory=lambda: [0.1, 1.0, 7.0], min_length=1)
    tol: float = Field(default=1e-9, gt=0)
    tracial_tol: float = Field(default=1e-12, gt=0)

    @model_validator(mode="after")
    def _kept(self) -> "EntropySpec":
        if self.uhlmann_kept >= self.uhlmann_qubits:
            raise ValueError("uhlmann_kept must be smaller than uhlmann_qubits")
        return self


class OutputSpec(BaseModel):
    dir: Path = Field(default=Path("results"), description="Output directory")
    format: Literal["csv", "json"] = Field(default="csv", description="Table format")


class RunConfig(BaseModel):
    """Complete description of one run.

    Examples
    --------
    >>> cfg = RunConfig(lattice={"kind": "hypercubic", "d": 1, "half_extent": 4}, symmetry={"a": [[1]]})
    >>> cfg.run.modes
    ['exact', 'triangle']
    """

    name: str = Field(default="run", description="Label used in output file names")
    lattice: LatticeSpec
    charges: ChargeSpec = Field(default_factory=ChargeSpec)
    interaction: Optional[InteractionSpec] = Field(default=None, description="Inline interaction")
    interaction_file: Optional[Path] = Field(default=None, description="Interaction JSON file")
    symmetry: SymmetrySpec = Field(default_factory=SymmetrySpec)
    cutoff: CutoffSpec = Field(default_factory=CutoffSpec)
    run: RunSpec = Field(default_factory=RunSpec)
    geometry: GeometrySpec = Field(default_factory=GeometrySpec)
    ffunction: Optional[FFunctionSpec] = None
    entropy: Optional[EntropySpec] = None
    output: OutputSpec = Field(default_factory=OutputSpec)
    model_config = ConfigDict(extra="forbid")

    @model_validator(mode="after")
    def _cross_references(self) -> "RunConfig":
        d = self.lattice.dim
        for a in self.symmetry.a:
            if len(a) != d:
                raise ValueError(f"multi-index {a} has length {len(a)}, lattice dimension is {d}")
        for j in self.symmetry.I:
            if not 1 <= j <= d:
                raise ValueError(f"invariance axis {j} outside 1..{d}")
            if any(a[j - 1] != 0 for a in self.symmetry.a):
                raise ValueError(f"multi-indices must vanish on invariance axis {j}")
        if self.entropy is not None:
            for a in self.entropy.tracial_a:
                if len(a) != d:
                    raise ValueError(f"tracial multi-index {a} has length {len(a)}, lattice dimension is {d}")
        if self.interaction is not None and self.interaction_file is not None:
            raise ValueError("give either interaction or interaction_file, not both")
        if self.interaction is not None:
            mismatched = sorted(self.interaction.local_dims() - {self.charges.local_dim})
            if mismatched:
                raise ValueError(
                    f"{self.charges.kind} charges act on dimension {self.charges.local_dim} per site, "
                    f"the interaction uses {mismatched}"
                )
        return self
