"""Smooth box cutoffs ``χ̃``, ``χ_m`` and the weighted cutoffs ``z^a χ_m(z)``.

The one-dimensional profile is ``χ̃(x) = 1`` for ``|x| ≤ 1``, ``0`` for
``|x| ≥ 2`` and on the transition region the partition

    B(t) = f(2 - t) / (f(2 - t) + f(t - 1)),   f(u) = exp(-1/u) for u > 0,

evaluated at ``t = |x|``. All derivatives of ``f`` have the closed form
``P_n(1/u) exp(-1/u)`` with ``P_{n+1}(v) = v² (P_n(v) - P_n'(v))``, so every
derivative used below is exact up to floating point.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Any, Iterator, List, Literal, Optional, Sequence, Tuple

from numpy.polynomial import Polynomial
from pydantic import BaseModel, ConfigDict, Field
import numpy as np

from mwmw.errors import PreconditionError


# exp(-v) underflows to 0 for v beyond this, whatever the polynomial prefactor.
_EXP_CUTOFF = 700.0

# Grid points per unit length when the profile does not fix one.
DEFAULT_RESOLUTION = {1: 2000, 2: 200}
FALLBACK_RESOLUTION = 50


def safety_for_resolution(resolution: int) -> float:
    """Safety factor applied to grid suprema; coarser grids get a wider margin.

    ======================  ======
    points per unit         factor
    ======================  ======
    ``≥ 200``               1.05
    ``50 .. 199``           1.2
    ``< 50``                1.5
    ======================  ======
    """
    if resolution >= 200:
        return 1.05
    if resolution >= 50:
        return 1.2
    return 1.5


class CutoffProfile(BaseModel):
    """Parameters of the product cutoff ``χ(x) = ∏_j χ̃(x_j)``.

    Attributes
    ----------
    bridge : {"exp_partition"}
        Transition function on ``[1, 2]``.
    dim : int
        Number of coordinates ``d``.
    derivative_order_max : int
        Highest derivative order the profile is used with (at least ``k + 1``).
    grid_resolution : int | None
        Points per unit for grid suprema; ``None`` picks 2000 in 1D, 200 in 2D, 50 above.
    safety : float | None
        Multiplier of grid suprema; ``None`` uses :func:`safety_for_resolution`.
    """

    bridge: Literal["exp_partition"] = Field(default="exp_partition", description="Transition function on [1, 2].")
    dim: int = Field(ge=1, description="Number of coordinates.")
    derivative_order_max: int = Field(default=2, ge=1, description="Highest derivative order in use.")
    grid_resolution: Optional[int] = Field(default=None, ge=2, description="Points per unit for grid suprema.")
    safety: Optional[float] = Field(default=None, ge=1.0, description="Multiplier of grid suprema.")
    model_config = ConfigDict(frozen=True)

    @property
    def resolution(self) -> int:
        if self.grid_resolution is not None:
            return self.grid_resolution
        return DEFAULT_RESOLUTION.get(self.dim, FALLBACK_RESOLUTION)

    @property
    def safety_factor(self) -> float:
        return self.safety if self.safety is not None else safety_for_resolution(self.resolution)


def multi_index_tuple(a: Any) -> Tuple[int, ...]:
    """Plain tuple of a multi-index given as a sequence or as an object with an ``a`` attribute."""
    values = tuple(int(v) for v in getattr(a, "a", a))
    if any(v < 0 for v in values):
        raise ValueError(f"multi-index entries must be nonnegative: {values}")
    return values


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All ``c ∈ N_0^parts`` with ``|c| = total``, in lexicographic order."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _exp_inverse_polys(n: int) -> Tuple[Polynomial, ...]:
    polys = [Polynomial([1.0])]
    v2 = Polynomial([0.0, 0.0, 1.0])
    for _ in range(n):
        p = polys[-1]
        polys.append(v2 * (p - p.deriv()))
    return tuple(polys)


def _f_derivative(n: int, u: np.ndarray) -> np.ndarray:
    """``d^n/du^n exp(-1/u)`` for ``u > 0``, zero elsewhere."""
    out = np.zeros_like(u, dtype=float)
    mask = u > 1.0 / _EXP_CUTOFF
    v = 1.0 / u[mask]
    out[mask] = _exp_inverse_polys(n)[n](v) * np.exp(-v)
    return out


def _bridge_derivatives(n: int, t: np.ndarray) -> List[np.ndarray]:
    """``B, B', ..., B^{(n)}`` on points of the open interval ``(1, 2)``.

    From ``B·S = F`` with ``S = F + G`` the Leibniz rule gives
    ``B^{(j)} = (F^{(j)} - Σ_{i<j} C(j,i) B^{(i)} S^{(j-i)}) / S``.
    """
    F = [(-1) ** i * _f_derivative(i, 2.0 - t) for i in range(n + 1)]
    G = [_f_derivative(i, t - 1.0) for i in range(n + 1)]
    S = [F[i] + G[i] for i in range(n + 1)]
    B: List[np.ndarray] = []
    for j in range(n + 1):
        acc = F[j].copy()
        for i in range(j):
            acc -= math.comb(j, i) * B[i] * S[j - i]
        B.append(acc / S[0])
    return B


def profile_derivative(n: int, x) -> np.ndarray:
    """``χ̃^{(n)}(x)`` elementwise."""
    x = np.asarray(x, dtype=float)
    y = np.abs(x)
    out = np.zeros_like(y)
    if n == 0:
        out[y <= 1.0] = 1.0
    mask = (y > 1.0) & (y < 2.0)
    if np.any(mask):
        values = _bridge_derivatives(n, y[mask])[n]
        if n % 2:
            values = np.where(x[mask] < 0, -values, values)
        out[mask] = values
    return out


def factor_derivative(a: int, n: int, y, m: float) -> np.ndarray:
    """``d^n/dy^n [y^a χ̃(y/m)]`` by the Leibniz rule."""
    y = np.asarray(y, dtype=float)
    total = np.zeros_like(y)
    for i in range(min(n, a) + 1):
        coef = math.comb(n, i) * math.perm(a, i)
        total = total + coef * y ** (a - i) * m ** (-(n - i)) * profile_derivative(n - i, y / m)
    return total


def _as_points(profile: CutoffProfile, z) -> Tuple[np.ndarray, bool]:
    z = np.asarray(z, dtype=float)
    single = z.ndim <= 1
    z = np.atleast_2d(z.reshape(-1) if single else z)
    if z.shape[1] != profile.dim:
        raise PreconditionError(f"points have {z.shape[1]} coordinates, profile has dim {profile.dim}")
    return z, single


def partial_derivative(profile: CutoffProfile, m: float, a: Any, c: Sequence[int], z) -> Any:
    """``∂^c χ_m^{(a)}(z)``; ``z`` is one point or an ``(n, d)`` array."""
    if m <= 0:
        raise ValueError("m must be positive")
    a = multi_index_tuple(a)
    c = tuple(int(v) for v in c)
    if len(a) != profile.dim or len(c) != profile.dim:
        raise PreconditionError(f"multi-index length must equal dim {profile.dim}")
    pts, single = _as_points(profile, z)
    out = np.ones(pts.shape[0])
    for j in range(profile.dim):
        out = out * factor_derivative(a[j], c[j], pts[:, j], float(m))
    return float(out[0]) if single else out


def evaluate_cutoff(profile: CutoffProfile, m: float, a: Any, z) -> Any:
    """``χ_m^{(a)}(z) = z^a χ(z/m)``.

    Examples
    --------
    >>> p = CutoffProfile(dim=1)
    >>> evaluate_cutoff(p, 5, (1,), [3.0]), evaluate_cutoff(p, 5, (1,), [10.0])
    (3.0, 0.0)
    """
    return partial_derivative(profile, m, a, (0,) * profile.dim, z)


def cutoff_weights(profile: CutoffProfile, m: float, a: Any, points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`evaluate_cutoff` over the rows of ``points``."""
    return np.asarray(evaluate_cutoff(profile, m, a, np.atleast_2d(points)), dtype=float)
