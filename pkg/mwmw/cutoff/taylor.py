"""Derivative constants ``C_a`` and Taylor remainders of the weighted cutoffs."""

from __future__ import annotations

import itertools
import logging
import math
from functools import lru_cache, reduce
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field
import numpy as np

from mwmw.configs.settings import app_config
from mwmw.cutoff.profile import (
    CutoffProfile,
    compositions,
    evaluate_cutoff,
    factor_derivative,
    multi_index_tuple,
    partial_derivative,
)
from mwmw.errors import PreconditionError, ResourceLimitError
from mwmw.geometry.lattice import Lattice


def _check_orders(profile: CutoffProfile, a: Tuple[int, ...], k: int) -> None:
    if len(a) != profile.dim:
        raise PreconditionError(f"multi-index {a} does not have length {profile.dim}")
    if k < 0 or sum(a) > k:
        raise PreconditionError(f"|a| = {sum(a)} must not exceed k = {k}")
    if k + 1 > profile.derivative_order_max:
        raise PreconditionError(f"k + 1 = {k + 1} exceeds derivative_order_max = {profile.derivative_order_max}")


@lru_cache(maxsize=128)
def _sup_derivative_sum(profile: CutoffProfile, a: Tuple[int, ...], k: int) -> float:
    n = 4 * profile.resolution + 1
    if n**profile.dim > app_config.MAX_POINTS:
        raise ResourceLimitError(f"grid of {n}^{profile.dim} points exceeds MAX_POINTS")
    grid = np.linspace(-2.0, 2.0, n)
    tables = [[np.abs(factor_derivative(a[j], c, grid, 1.0)) for c in range(k + 2)] for j in range(profile.dim)]
    total = np.zeros((n,) * profile.dim)
    for c in compositions(k + 1, profile.dim):
        # number of ordered derivative sequences ν_1..ν_{k+1} that realise c
        weight = math.factorial(k + 1) // math.prod(math.factorial(v) for v in c)
        total += weight * reduce(np.multiply.outer, [tables[j][c[j]] for j in range(profile.dim)])
    return float(total.max())


def compute_Ca(profile: CutoffProfile, a: Any, k: int) -> float:
    """Derivative constant of the weighted cutoff ``χ^{(a)}(z) = z^a χ(z)``.

    ``C_a = safety · sup_ξ Σ_{ν_1..ν_{k+1}} |∂_{ν_1}..∂_{ν_{k+1}} χ^{(a)}(ξ)| / (k+1)!``
    with the supremum taken on a regular grid of ``[-2, 2]^d``. The value does
    not depend on ``m``; it only bounds the true supremum up to the safety margin.

    Parameters
    ----------
    profile : CutoffProfile
        Cutoff shape and grid settings.
    a : sequence of int
        Multi-index with ``|a| ≤ k``.
    k : int
        Symmetry order; derivatives of order ``k + 1`` enter.

    Returns
    -------
    float
        Positive constant.
    """
    a = multi_index_tuple(a)
    _check_orders(profile, a, k)
    sup = _sup_derivative_sum(profile, a, k)
    value = profile.safety_factor * sup / math.factorial(k + 1)
    logging.debug("C_a for a=%s, k=%d: %.12g (resolution %d)", a, k, value, profile.resolution)
    return value


def _all_orders_up_to(k: int, d: int) -> List[Tuple[int, ...]]:
    return [c for total in range(k + 1) for c in compositions(total, d)]


def taylor_polynomial(profile: CutoffProfile, m: float, a: Any, k: int, x, z) -> Any:
    """Order-``k`` Taylor polynomial of ``χ_m^{(a)}`` around ``x`` evaluated at ``z``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    z = np.atleast_2d(np.asarray(z, dtype=float))
    single = x.shape[0] == 1 and z.shape[0] == 1
    dz = z - x
    total = np.zeros(max(x.shape[0], z.shape[0]))
    for c in _all_orders_up_to(k, profile.dim):
        deriv = np.asarray(partial_derivative(profile, m, a, c, x), dtype=float)
        monomial = np.prod(dz ** np.array(c), axis=1)
        total = total + deriv * monomial / math.prod(math.factorial(v) for v in c)
    return float(total[0]) if single else total


def taylor_remainder_exact(profile: CutoffProfile, m: float, a: Any, k: int, x, z) -> Any:
    """``R_{k+1}(x, z) = χ_m^{(a)}(z) - T_k(x; z)``.

    Examples
    --------
    >>> p = CutoffProfile(dim=1)
    >>> taylor_remainder_exact(p, 4, (0,), 1, [1.0], [2.0])
    0.0
    """
    a = multi_index_tuple(a)
    if sum(a) > k:
        raise PreconditionError(f"|a| = {sum(a)} must not exceed k = {k}")
    value = np.asarray(evaluate_cutoff(profile, m, a, np.atleast_2d(z)), dtype=float)
    remainder = value - np.atleast_1d(taylor_polynomial(profile, m, a, k, x, z))
    return float(remainder[0]) if remainder.size == 1 else remainder


class RemainderBound(BaseModel):
    """Closed-form bound ``C_a m^{-(k-|a|+1)} |x - z|^{k+1}`` on the Taylor remainder."""

    a: Tuple[int, ...]
    k: int = Field(ge=0)
    C_a: float = Field(gt=0)
    m: float = Field(ge=1)
    grid_certified: bool = Field(
        default=True, description="C_a is a grid supremum times a safety factor, not a proven bound."
    )

    @classmethod
    def for_profile(cls, profile: CutoffProfile, a: Any, k: int, m: float) -> "RemainderBound":
        a = multi_index_tuple(a)
        return cls(a=a, k=k, C_a=compute_Ca(profile, a, k), m=m)

    @property
    def prefactor(self) -> float:
        return self.C_a * self.m ** (-(self.k - sum(self.a) + 1))


def taylor_remainder_bound(rb: RemainderBound, x, z) -> Any:
    """Bound value at ``(x, z)`` using the Euclidean distance."""
    dist = np.linalg.norm(np.atleast_2d(np.asarray(z, dtype=float) - np.asarray(x, dtype=float)), axis=1)
    value = rb.prefactor * dist ** (rb.k + 1)
    return float(value[0]) if value.size == 1 else value


class SlabDerivativeReport(BaseModel):
    """Vanishing of ``∂_j χ_m^{(a)}`` on the lattice for bounded axes ``j``."""

    certified: bool
    m: float
    a: Tuple[int, ...]
    index_set_I: Tuple[int, ...]
    bounds: Dict[int, float]
    max_abs_derivative: float
    witness_point: Optional[Tuple[float, ...]] = None
    witness_axis: Optional[int] = None
    n_points: int
    note: str = ""


def _slab_points(profile: CutoffProfile, m: float, bounds: Dict[int, float]) -> np.ndarray:
    axes = []
    for j in range(1, profile.dim + 1):
        if j in bounds:
            axes.append(np.arange(0, int(math.floor(bounds[j])) + 1, dtype=float))
        else:
            reach = int(math.ceil(2 * m)) + 1
            axes.append(np.arange(-reach, reach + 1, dtype=float))
    count = math.prod(len(ax) for ax in axes)
    if count > app_config.MAX_POINTS:
        raise ResourceLimitError(f"{count} slab points exceed MAX_POINTS")
    return np.array(list(itertools.product(*axes)), dtype=float)


def check_slab_derivatives(
    profile: CutoffProfile,
    m: float,
    a: Any,
    index_set_I: Sequence[int],
    bounds: Optional[Dict[int, float]] = None,
    lat: Optional[Lattice] = None,
    tol: float = 1e-12,
) -> SlabDerivativeReport:
    """Check ``∂_j χ_m^{(a)}(x) = 0`` for every lattice point ``x`` and ``j ∈ I``.

    Bounded axes carry ``|x_j| ≤ M_j``; certification additionally requires
    ``m > max_j M_j``. Without a lattice, points are the integer slab reaching
    past ``2m`` on the free axes.

    Raises
    ------
    PreconditionError
        If ``a_j ≠ 0`` for some ``j ∈ I`` or an axis of ``I`` has no bound.
    """
    a = multi_index_tuple(a)
    I = tuple(sorted(int(j) for j in index_set_I))
    if bounds is None:
        bounds = dict(lat.slab_bounds) if lat is not None else {}
    bounds = {int(j): float(v) for j, v in bounds.items()}
    if len(a) != profile.dim:
        raise PreconditionError(f"multi-index {a} does not have length {profile.dim}")
    for j in I:
        if not 1 <= j <= profile.dim:
            raise PreconditionError(f"axis {j} outside 1..{profile.dim}")
        if a[j - 1] != 0:
            raise PreconditionError(f"a_{j} = {a[j - 1]} must vanish for j in I")
        if j not in bounds:
            raise PreconditionError(f"axis {j} in I has no bound M_{j}")

    points = lat.coords if lat is not None else _slab_points(profile, m, bounds)
    worst, witness, witness_axis = 0.0, None, None
    for j in I:
        c = tuple(1 if i == j - 1 else 0 for i in range(profile.dim))
        values = np.abs(np.asarray(partial_derivative(profile, m, a, c, points), dtype=float))
        i = int(np.argmax(values))
        if values[i] > worst:
            worst, witness, witness_axis = float(values[i]), tuple(float(v) for v in points[i]), j

    largest_bound = max((bounds[j] for j in I), default=0.0)
    notes = []
    if not m > largest_bound:
        notes.append(f"m = {m:g} does not exceed max M_j = {largest_bound:g}")
    if worst > tol:
        notes.append(f"derivative {worst:.3e} above tolerance")
    return SlabDerivativeReport(
        certified=not notes,
        m=m,
        a=a,
        index_set_I=I,
        bounds={j: bounds[j] for j in I},
        max_abs_derivative=worst,
        witness_point=witness,
        witness_axis=witness_axis,
        n_points=int(points.shape[0]),
        note="; ".join(notes),
    )
