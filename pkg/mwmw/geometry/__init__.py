"""Finite lattices, ball counting and growth-condition certification."""

from mwmw.geometry.lattice import (
    GammaEstimate,
    GrowthParams,
    GrowthReport,
    GrowthWitness,
    Lattice,
    ball_count,
    box_sites,
    estimate_gamma,
    lattice_from_points,
    make_hypercubic,
    make_slab,
    verify_growth,
)

__all__ = [
    "GammaEstimate",
    "GrowthParams",
    "GrowthReport",
    "GrowthWitness",
    "Lattice",
    "ball_count",
    "box_sites",
    "estimate_gamma",
    "lattice_from_points",
    "make_hypercubic",
    "make_slab",
    "verify_growth",
]
