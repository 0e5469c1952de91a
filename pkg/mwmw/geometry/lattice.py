"""Finite lattices embedded in R^d with Euclidean metric.

Points are kept in lexicographic order. That order is the canonical
tensor-factor order used by :mod:`mwmw.algebra`, so every constructor sorts
before building a :class:`Lattice`.
"""

from __future__ import annotations

import itertools
import logging
import math
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial.distance import cdist
import numpy as np

from mwmw.configs.settings import app_config


Point = Tuple[float, ...]
CenterLike = Union[int, Sequence[float]]

# Relative slack on r^2 for non-integer coordinates.
_R2_TOL = 1e-12
# Rows of the pairwise distance matrix materialised at once.
_CHUNK = 512


class GrowthParams(BaseModel):
    """Growth-condition constants ``|B_r(z) ∩ L| ≤ C r^gamma`` for ``r ≥ r0``."""

    C: Optional[float] = Field(default=None, gt=0, description="Prefactor C.")
    gamma: float = Field(gt=0, description="Effective dimension gamma.")
    r0: float = Field(default=1.0, ge=0, description="Smallest radius the bound applies to.")
    model_config = ConfigDict(frozen=True)


class Lattice(BaseModel):
    """A finite point set in R^d.

    Attributes
    ----------
    points : tuple of tuple of float
        Coordinates in lexicographic order.
    dim_ambient : int
        Ambient dimension d.
    kind : str
        ``hypercubic``, ``slab`` or ``points``.
    growth : GrowthParams | None
        Recorded growth metadata. Never inferred silently.
    slab_bounds : dict[int, float] | None
        Map from bounded axis (1-based) to the bound ``M_j`` with ``|x_j| ≤ M_j``.
    half_extent, free_dims, bounded_sizes
        Construction parameters, kept for JSON round trips.
    """

    points: Tuple[Point, ...] = Field(description="Coordinates in canonical lexicographic order.")
    dim_ambient: int = Field(ge=1, description="Ambient dimension d.")
    kind: str = Field(default="points", description="Construction kind.")
    growth: Optional[GrowthParams] = Field(default=None, description="Recorded growth parameters.")
    slab_bounds: Optional[Dict[int, float]] = Field(default=None, description="Bounded axes (1-based) and bounds.")
    half_extent: Optional[int] = Field(default=None, description="Half extent for hypercubic/slab kinds.")
    free_dims: Optional[int] = Field(default=None, description="Number of unbounded axes of a slab.")
    bounded_sizes: Tuple[int, ...] = Field(default=(), description="Sizes M of the bounded slab axes.")
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check_points(self) -> "Lattice":
        if not self.points:
            raise ValueError("lattice must contain at least one point")
        if any(len(p) != self.dim_ambient for p in self.points):
            raise ValueError(f"all points must have dimension {self.dim_ambient}")
        if list(self.points) != sorted(self.points):
            raise ValueError("points must be in lexicographic order")
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be pairwise distinct")
        if self.slab_bounds:
            coords = np.asarray(self.points, dtype=float)
            for axis, bound in self.slab_bounds.items():
                if not 1 <= axis <= self.dim_ambient:
                    raise ValueError(f"slab axis {axis} outside 1..{self.dim_ambient}")
                if np.any(np.abs(coords[:, axis - 1]) > bound + 1e-12):
                    raise ValueError(f"points violate slab bound |x_{axis}| <= {bound}")
        return self

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates as an ``(n, d)`` float array."""
        arr = np.asarray(self.points, dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def is_integral(self) -> bool:
        """Whether every coordinate is an integer."""
        return bool(np.all(self.coords == np.round(self.coords)))

    @cached_property
    def site_lookup(self) -> Dict[Point, int]:
        return {p: i for i, p in enumerate(self.points)}

    @property
    def n_sites(self) -> int:
        return len(self.points)

    def index_of(self, point: CenterLike) -> int:
        """Return the site index of ``point`` (an index is passed through).

        Raises
        ------
        KeyError
            If the point is not a lattice point.
        """
        if isinstance(point, (int, np.integer)):
            idx = int(point)
            if not 0 <= idx < self.n_sites:
                raise KeyError(f"site index {idx} outside lattice of {self.n_sites} points")
            return idx
        key = tuple(float(c) for c in point)
        if key not in self.site_lookup:
            raise KeyError(f"point {key} is not in the lattice")
        return self.site_lookup[key]

    def distance(self, i: int, j: int) -> float:
        return float(np.linalg.norm(self.coords[i] - self.coords[j]))

    def sq_distances_from(self, centers: Sequence[int]) -> np.ndarray:
        """Squared Euclidean distances from ``centers`` to every lattice point."""
        return cdist(self.coords[list(centers)], self.coords, metric="sqeuclidean")

    def extent(self) -> float:
        """Largest sup-norm of a lattice point."""
        return float(np.max(np.abs(self.coords)))


def _check_count(n: int) -> None:
    if n > app_config.MAX_POINTS:
        raise OverflowError(f"lattice would contain {n} points, above MAX_POINTS={app_config.MAX_POINTS}")


def make_hypercubic(d: int, half_extent: int) -> Lattice:
    """Build ``{-half_extent, ..., half_extent}^d``.

    Parameters
    ----------
    d : int
        Ambient dimension.
    half_extent : int
        Largest absolute coordinate.

    Returns
    -------
    Lattice
        Hypercubic lattice with ``gamma = d`` and ``C = 3^d``, ``r0 = 1`` recorded.

    Examples
    --------
    >>> make_hypercubic(2, 1).n_sites
    9
    """
    if d < 1 or half_extent < 1:
        raise ValueError("d and half_extent must be positive")
    _check_count((2 * half_extent + 1) ** d)
    axis = range(-half_extent, half_extent + 1)
    points = tuple(tuple(float(c) for c in p) for p in itertools.product(axis, repeat=d))
    return Lattice(
        points=points,
        dim_ambient=d,
        kind="hypercubic",
        growth=GrowthParams(C=float(3**d), gamma=float(d), r0=1.0),
        half_extent=half_extent,
    )


def make_slab(free_dims: int, free_extent: int, bounded_sizes: Sequence[int]) -> Lattice:
    """Build ``{-e..e}^l × {0..M_1-1} × ... × {0..M_k-1}``.

    Bounded axes are numbered ``l+1..d`` (1-based) in ``slab_bounds``, with
    ``M_j = size - 1``. With no bounded axes this is :func:`make_hypercubic`.
    """
    if free_dims < 1 or free_extent < 1:
        raise ValueError("free_dims and free_extent must be positive")
    if any(size < 1 for size in bounded_sizes):
        raise ValueError("bounded sizes must be positive")
    if not bounded_sizes:
        return make_hypercubic(free_dims, free_extent)
    _check_count((2 * free_extent + 1) ** free_dims * math.prod(bounded_sizes))
    axes: List[range] = [range(-free_extent, free_extent + 1)] * free_dims
    axes += [range(size) for size in bounded_sizes]
    points = tuple(tuple(float(c) for c in p) for p in itertools.product(*axes))
    d = free_dims + len(bounded_sizes)
    bounds = {free_dims + j + 1: float(size - 1) for j, size in enumerate(bounded_sizes)}
    return Lattice(
        points=points,
        dim_ambient=d,
        kind="slab",
        growth=GrowthParams(C=float(3**free_dims * math.prod(bounded_sizes)), gamma=float(free_dims), r0=1.0),
        slab_bounds=bounds,
        half_extent=free_extent,
        free_dims=free_dims,
        bounded_sizes=tuple(bounded_sizes),
    )


def lattice_from_points(points: Sequence[Sequence[float]], gamma: Optional[float] = None) -> Lattice:
    """Build a lattice from an explicit point list (sorted and de-duplicated check)."""
    pts = [tuple(float(c) for c in p) for p in points]
    if not pts:
        raise ValueError("point list is empty")
    _check_count(len(pts))
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    d = len(pts[0])
    growth = GrowthParams(gamma=gamma) if gamma is not None else None
    return Lattice(points=tuple(sorted(pts)), dim_ambient=d, kind="points", growth=growth)


def _radius_threshold(lat: Lattice, r: float) -> float:
    r2 = float(r) * float(r)
    return r2 if lat.is_integral else r2 - _R2_TOL * max(1.0, r2)


def ball_count(lat: Lattice, center: CenterLike, r: float) -> int:
    """Count lattice points at distance strictly less than ``r`` from ``center``.

    Examples
    --------
    >>> ball_count(make_hypercubic(2, 3), (0, 0), 1.5)
    9
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    idx = lat.index_of(center)
    d2 = lat.sq_distances_from([idx])[0]
    return int(np.count_nonzero(d2 < _radius_threshold(lat, r)))


class GrowthWitness(BaseModel):
    center_index: int
    center: Point
    r: float
    count: int
    allowed: float


class GrowthReport(BaseModel):
    """Result of :func:`verify_growth`.

    The condition is certified only on the tested radii and the finite extent
    of the lattice; ``note`` says so in every report.
    """

    passed: bool = Field(description="All (center, radius) pairs satisfied the bound.")
    worst_ratio: float = Field(description="Largest count / (C r^gamma).")
    witness: Optional[GrowthWitness] = Field(default=None, description="Violating pair with the largest ratio.")
    C: float
    gamma: float
    r0: float
    tested_range: Tuple[float, float] = Field(description="Smallest and largest tested radius.")
    n_sites: int
    lattice_extent: float
    note: str = "certified only on the tested radii and the finite lattice extent"


def verify_growth(lat: Lattice, C: float, gamma: float, r0: float, r_grid: Sequence[float]) -> GrowthReport:
    """Check ``|B_r(z) ∩ L| ≤ C r^gamma`` for every center and every grid radius.

    Parameters
    ----------
    lat : Lattice
        Finite lattice.
    C, gamma, r0 : float
        Growth constants.
    r_grid : sequence of float
        Radii to test; each must be ``≥ r0``.

    Returns
    -------
    GrowthReport
        Pass flag, worst ratio and the violating ``(z, r)`` with the largest ratio.
    """
    radii = sorted(float(r) for r in r_grid)
    if not radii:
        raise ValueError("radius grid is empty")
    if radii[0] < r0:
        raise ValueError(f"grid radius {radii[0]} is below r0={r0}")
    thresholds = np.array([_radius_threshold(lat, r) for r in radii])
    allowed = np.array([C * r**gamma for r in radii])

    worst_ratio = -np.inf
    worst: Optional[Tuple[int, int, int]] = None
    for start in range(0, lat.n_sites, _CHUNK):
        centers = list(range(start, min(start + _CHUNK, lat.n_sites)))
        d2 = np.sort(lat.sq_distances_from(centers), axis=1)
        counts = np.stack([np.searchsorted(row, thresholds, side="left") for row in d2])
        ratios = counts / allowed[None, :]
        flat = int(np.argmax(ratios))
        ci, ri = divmod(flat, len(radii))
        if ratios[ci, ri] > worst_ratio:
            worst_ratio = float(ratios[ci, ri])
            worst = (centers[ci], ri, int(counts[ci, ri]))

    passed = worst_ratio <= 1.0
    witness = None
    if not passed and worst is not None:
        idx, ri, count = worst
        witness = GrowthWitness(
            center_index=idx, center=lat.points[idx], r=radii[ri], count=count, allowed=float(allowed[ri])
        )
        logging.info(
            "Growth condition violated at center %s, r=%s (%d > %.6g)", lat.points[idx], radii[ri], count, allowed[ri]
        )
    return GrowthReport(
        passed=passed,
        worst_ratio=float(worst_ratio),
        witness=witness,
        C=C,
        gamma=gamma,
        r0=r0,
        tested_range=(radii[0], radii[-1]),
        n_sites=lat.n_sites,
        lattice_extent=lat.extent(),
    )


def box_sites(lat: Lattice, m: float, margin: float = 0.0) -> Tuple[int, ...]:
    """Indices of lattice points with ``|x|_∞ ≤ m + margin`` in canonical order."""
    bound = float(m) + float(margin) + 1e-12
    mask = np.all(np.abs(lat.coords) <= bound, axis=1)
    return tuple(int(i) for i in np.flatnonzero(mask))


class GammaEstimate(BaseModel):
    """Log-log fit of ball counts; labelled as an estimate, never a certificate."""

    label: str = "estimate"
    gamma: float
    log_C: float
    center: Point
    radii: Tuple[float, ...]
    counts: Tuple[int, ...]


def estimate_gamma(lat: Lattice, r_grid: Sequence[float], center: Optional[CenterLike] = None) -> GammaEstimate:
    """Fit ``log count = log C + gamma log r`` around ``center`` (default: point closest to the origin)."""
    radii = [float(r) for r in r_grid if r > 0]
    if len(radii) < 2:
        raise ValueError("need at least two positive radii for a fit")
    if center is None:
        idx = int(np.argmin(np.linalg.norm(lat.coords, axis=1)))
    else:
        idx = lat.index_of(center)
    counts = [ball_count(lat, idx, r) for r in radii]
    slope, intercept = np.polyfit(np.log(radii), np.log(counts), 1)
    return GammaEstimate(
        gamma=float(slope), log_C=float(intercept), center=lat.points[idx], radii=tuple(radii), counts=tuple(counts)
    )
