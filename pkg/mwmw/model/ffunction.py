"""F-functions: nonincreasing, summable weights with a convolution bound.

A function ``F`` qualifies on ``(L, D)`` when it is nonincreasing,
``‖F‖ = sup_x Σ_y F(D(x,y)) < ∞`` and
``Σ_z F(D(x,z)) F(D(z,y)) ≤ C_F F(D(x,y))``. On a finite lattice both
constants are finite; the growth of ``‖F‖`` along a series of truncations is
what separates admissible exponents from inadmissible ones.
"""

from __future__ import annotations

import logging
from typing import Callable, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import cdist
from tqdm import tqdm
import numpy as np

from mwmw.geometry.lattice import Lattice, box_sites, make_hypercubic


# Rows of the distance matrix evaluated at once in the norm sum.
_ROW_CHUNK = 1000


class FFunctionMeasurement(BaseModel):
    norm_F: float
    C_F: float
    n_sites: int


class FFunction(BaseModel):
    """Radial weight ``r ↦ F(r) > 0``.

    Attributes
    ----------
    evaluator : callable
        Vectorised map from distances to weights.
    lam : float | None
        Exponent of the builtin power law ``(1+r)^{-lam}``.
    label : str
        Name shown in reports.
    measured : FFunctionMeasurement | None
        Constants from the last :func:`check_f_function` run.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    lam: Optional[float] = None
    label: str = "custom"
    measured: Optional[FFunctionMeasurement] = None
    model_config = ConfigDict(arbitrary_types_allowed=True)

    def __call__(self, r) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(r, dtype=float)), dtype=float)


def power_law(lam: float) -> FFunction:
    """``F(r) = (1 + r)^{-lam}``."""
    if lam <= 0:
        raise ValueError("power-law exponent must be positive")
    return FFunction(evaluator=lambda r: np.exp(-lam * np.log1p(r)), lam=float(lam), label=f"(1+r)^-{lam:g}")


def constant(value: float = 1.0) -> FFunction:
    if value <= 0:
        raise ValueError("F must be positive")
    return FFunction(evaluator=lambda r: np.full(np.shape(r), float(value)), label=f"const {value:g}")


def is_power_law_f_function(lam: float, gamma: float) -> bool:
    """``(1+r)^{-lam}`` is an F-function on a lattice of effective dimension ``gamma`` iff ``lam > 1 + gamma``."""
    return lam > 1.0 + gamma


def sufficient_decay_exponent(k: int, gamma: float) -> float:
    """Exponent ``4 + 2k + 2gamma`` whose power-law decay implies the k-th order decay condition."""
    return 4.0 + 2.0 * k + 2.0 * gamma


class FFunctionReport(BaseModel):
    """Result of :func:`check_f_function` on one finite lattice."""

    label: str
    monotone: bool = Field(description="F nonincreasing on the sampled radii.")
    norm_F: float = Field(description="max_x Σ_y F(D(x,y)).")
    norm_F_argmax: int = Field(description="Site attaining norm_F (first in canonical order).")
    C_F: float = Field(description="max_{x,y} Σ_z F(D(x,z))F(D(z,y)) / F(D(x,y)) on the convolution window.")
    C_F_window: int = Field(description="Number of sites the convolution constant was computed on.")
    n_sites: int
    lattice_extent: float


def _monotone(F: FFunction, radii: np.ndarray) -> bool:
    values = F(np.sort(radii))
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        return False
    return bool(np.all(np.diff(values) <= 1e-15 * np.maximum(1.0, values[:-1])))


def check_f_function(
    F: FFunction,
    lat: Lattice,
    r_grid: Optional[Sequence[float]] = None,
    convolution_sites: int = 1500,
) -> FFunctionReport:
    """Measure the F-function constants on a finite lattice.

    Parameters
    ----------
    F : FFunction
        Candidate weight.
    lat : Lattice
        Finite lattice.
    r_grid : sequence of float, optional
        Extra radii for the monotonicity check (lattice distances are always sampled).
    convolution_sites : int, default=1500
        ``C_F`` needs an ``n × n`` matrix product; larger lattices use the
        central box holding at most this many sites.

    Returns
    -------
    FFunctionReport
        Monotonicity flag, ``norm_F`` and ``C_F``.
    """
    coords = lat.coords
    norm_F, argmax = -np.inf, 0
    sampled = [np.zeros(1)]
    for start in range(0, lat.n_sites, _ROW_CHUNK):
        dist = cdist(coords[start : start + _ROW_CHUNK], coords)
        sums = F(dist).sum(axis=1)
        i = int(np.argmax(sums))
        if sums[i] > norm_F:
            norm_F, argmax = float(sums[i]), start + i
        sampled.append(np.unique(dist[0]))
    radii = np.unique(np.concatenate(sampled + ([np.asarray(r_grid, dtype=float)] if r_grid is not None else [])))

    window = _convolution_window(lat, convolution_sites)
    wc = coords[list(window)]
    M = F(cdist(wc, wc))
    C_F = float(np.max((M @ M) / M))

    report = FFunctionReport(
        label=F.label,
        monotone=_monotone(F, radii),
        norm_F=norm_F,
        norm_F_argmax=argmax,
        C_F=C_F,
        C_F_window=len(window),
        n_sites=lat.n_sites,
        lattice_extent=lat.extent(),
    )
    F.measured = FFunctionMeasurement(norm_F=norm_F, C_F=C_F, n_sites=lat.n_sites)
    return report


def _convolution_window(lat: Lattice, max_sites: int):
    if lat.n_sites <= max_sites:
        return tuple(range(lat.n_sites))
    lo, hi = 0.0, lat.extent()
    best = box_sites(lat, 0.0)
    # bisection on the half width of the central box
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        sites = box_sites(lat, mid)
        if len(sites) <= max_sites:
            lo, best = mid, sites
        else:
            hi = mid
    return best if best else (int(np.argmin(np.abs(lat.coords).max(axis=1))),)


class FFunctionSeries(BaseModel):
    """``norm_F`` along growing truncations of ``Z^d``."""

    label: str
    d: int
    truncations: List[int]
    reports: List[FFunctionReport]
    growth_ratio: float = Field(description="norm_F(last) / norm_F(first).")
    growing: bool = Field(description="growth_ratio exceeded 1 + growth_tol.")
    growth_tol: float


def f_function_series(
    F: FFunction, d: int, truncations: Sequence[int], growth_tol: float = 0.01, progress: bool = False
) -> FFunctionSeries:
    """Recompute ``norm_F`` on ``{-h..h}^d`` for each half extent ``h`` in ``truncations``."""
    if not truncations:
        raise ValueError("no truncations given")
    reports = []
    for h in tqdm(sorted(truncations), desc="F-function truncations", disable=not progress):
        reports.append(check_f_function(F, make_hypercubic(d, int(h))))
    ratio = reports[-1].norm_F / reports[0].norm_F
    growing = ratio > 1.0 + growth_tol
    logging.info("F-function %s: norm ratio %.6g over truncations %s", F.label, ratio, list(truncations))
    return FFunctionSeries(
        label=F.label,
        d=d,
        truncations=sorted(int(h) for h in truncations),
        reports=reports,
        growth_ratio=float(ratio),
        growing=bool(growing),
        growth_tol=growth_tol,
    )
