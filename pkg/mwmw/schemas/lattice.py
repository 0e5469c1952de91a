"""Lattice description as it appears in run configurations.

A ``LatticeSpec`` names one of the three constructions (hypercubic box, slab or
explicit point list) together with its parameters, so a lattice can be
rebuilt from JSON.
"""

from __future__ import annotations

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from mwmw.geometry.lattice import Lattice, lattice_from_points, make_hypercubic, make_slab


class LatticeSpec(BaseModel):
    """Serializable recipe for a :class:`~mwmw.geometry.lattice.Lattice`.

    Parameters
    ----------
    kind : {"hypercubic", "slab", "points"}
        Construction to use.
    d : int | None
        Ambient dimension of a hypercubic box.
    half_extent : int | None
        Largest absolute coordinate of a hypercubic box.
    free_dims, free_extent, bounded_sizes
        Slab parameters: ``{-e..e}^l × {0..M_1-1} × ...``.
    points : list[list[float]] | None
        Explicit coordinates.
    gamma : float | None
        Growth exponent recorded with an explicit point list.

    Examples
    --------
    >>> LatticeSpec(kind="hypercubic", d=1, half_extent=3).build().n_sites
    7
    """

    kind: Literal["hypercubic", "slab", "points"] = Field(description="Lattice construction")
    d: Optional[int] = Field(default=None, ge=1, description="Ambient dimension (hypercubic)")
    half_extent: Optional[int] = Field(default=None, ge=1, description="Half extent (hypercubic)")
    free_dims: Optional[int] = Field(default=None, ge=1, description="Unbounded axes (slab)")
    free_extent: Optional[int] = Field(default=None, ge=1, description="Half extent of the free axes (slab)")
    bounded_sizes: List[int] = Field(default_factory=list, description="Sizes of the bounded axes (slab)")
    points: Optional[List[List[float]]] = Field(default=None, description="Explicit coordinates (points)")
    gamma: Optional[float] = Field(default=None, gt=0, description="Recorded growth exponent (points)")

    @model_validator(mode="after")
    def _check_kind(self) -> "LatticeSpec":
        if self.kind == "hypercubic" and (self.d is None or self.half_extent is None):
            raise ValueError("hypercubic lattice needs d and half_extent")
        if self.kind == "slab" and (self.free_dims is None or self.free_extent is None):
            raise ValueError("slab lattice needs free_dims and free_extent")
        if self.kind == "points":
            if not self.points:
                raise ValueError("points lattice needs a non-empty point list")
            if len({len(p) for p in self.points}) != 1:
                raise ValueError("all points must have the same number of coordinates")
        return self

    @property
    def dim(self) -> int:
        if self.kind == "hypercubic":
            return int(self.d)
        if self.kind == "slab":
            return int(self.free_dims) + len(self.bounded_sizes)
        return len(self.points[0])

    def build(self) -> Lattice:
        if self.kind == "hypercubic":
            return make_hypercubic(self.d, self.half_extent)
        if self.kind == "slab":
            return make_slab(self.free_dims, self.free_extent, self.bounded_sizes)
        return lattice_from_points(self.points, gamma=self.gamma)

    @classmethod
    def from_lattice(cls, lat: Lattice) -> "LatticeSpec":
        if lat.kind == "hypercubic":
            return cls(kind="hypercubic", d=lat.dim_ambient, half_extent=lat.half_extent)
        if lat.kind == "slab":
            return cls(
                kind="slab",
                free_dims=lat.free_dims,
                free_extent=lat.half_extent,
                bounded_sizes=list(lat.bounded_sizes),
            )
        gamma = lat.growth.gamma if lat.growth is not None else None
        return cls(kind="points", points=[list(p) for p in lat.points], gamma=gamma)
