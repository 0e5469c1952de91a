"""Multi-indices ``a ∈ N_0^d`` labelling the multipole generators."""

from __future__ import annotations

from typing import Iterable, List, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator
import numpy as np

from mwmw.cutoff.profile import compositions
from mwmw.errors import ConfigError


class MultiIndex(BaseModel):
    """``a = (a_1, ..., a_d)`` with ``x^a = ∏_j x_j^{a_j}``."""

    a: Tuple[int, ...] = Field(description="Nonnegative exponents, one per axis.")
    model_config = ConfigDict(frozen=True)

    @field_validator("a")
    @classmethod
    def _nonnegative(cls, value: Tuple[int, ...]) -> Tuple[int, ...]:
        if not value:
            raise ValueError("multi-index must have at least one entry")
        if any(v < 0 for v in value):
            raise ValueError(f"multi-index entries must be nonnegative: {value}")
        return value

    @classmethod
    def of(cls, value: Union["MultiIndex", str, Sequence[int]]) -> "MultiIndex":
        """Accept a MultiIndex, a sequence, or comma-separated text such as ``"1,0"``."""
        if isinstance(value, MultiIndex):
            return value
        if isinstance(value, str):
            try:
                value = [int(part) for part in value.split(",") if part.strip()]
            except ValueError as exc:
                raise ConfigError(f"cannot parse multi-index {value!r}") from exc
        return cls(a=tuple(int(v) for v in value))

    @classmethod
    def zero(cls, d: int) -> "MultiIndex":
        return cls(a=(0,) * d)

    @property
    def order(self) -> int:
        return sum(self.a)

    @property
    def d(self) -> int:
        return len(self.a)

    def monomial(self, points: np.ndarray) -> np.ndarray:
        """``x^a`` for each row of ``points`` (``0^0 = 1``)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.d:
            raise ValueError(f"points have {points.shape[1]} coordinates, multi-index has {self.d}")
        return np.prod(points ** np.array(self.a), axis=1)

    def __str__(self) -> str:
        return ",".join(str(v) for v in self.a)


def multi_indices(d: int, k: int, index_set_I: Iterable[int] = ()) -> List[MultiIndex]:
    """All ``a`` with ``|a| ≤ k`` and ``a_j = 0`` for every (1-based) ``j`` in ``index_set_I``.

    Ordered by total degree, then lexicographically.

    Examples
    --------
    >>> [str(a) for a in multi_indices(2, 1)]
    ['0,0', '0,1', '1,0']
    >>> [str(a) for a in multi_indices(2, 1, [2])]
    ['0,0', '1,0']
    """
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    excluded = {int(j) for j in index_set_I}
    if any(not 1 <= j <= d for j in excluded):
        raise ConfigError(f"index set {sorted(excluded)} outside axes 1..{d}")
    out = []
    for total in range(k + 1):
        for c in compositions(total, d):
            if all(c[j - 1] == 0 for j in excluded):
                out.append(MultiIndex(a=c))
    return out
