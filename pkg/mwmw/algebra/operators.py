"""Local operators, volumes and the canonical embedding ``A ⊗ I``.

Every tensor product in the package is built here. Factor order is the
ascending site index, i.e. the lattice's lexicographic point order.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import sparse
import numpy as np

from mwmw.algebra.linalg import hermiticity_defect, is_diagonal, is_hermitian, op_norm
from mwmw.configs.settings import app_config
from mwmw.errors import ResourceLimitError, SupportError


class Volume(BaseModel):
    """A finite ordered set of sites with their local dimensions."""

    sites: Tuple[int, ...] = Field(description="Site indices in ascending order.")
    dims: Tuple[int, ...] = Field(description="Local Hilbert-space dimension of each site.")
    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check(self) -> "Volume":
        if len(self.sites) != len(self.dims):
            raise ValueError("sites and dims must have the same length")
        if list(self.sites) != sorted(set(self.sites)):
            raise ValueError("sites must be strictly increasing")
        if any(d < 1 for d in self.dims):
            raise ValueError("local dimensions must be positive")
        return self

    @classmethod
    def from_sites(cls, sites: Iterable[int], site_dims: Mapping[int, int]) -> "Volume":
        ordered = tuple(sorted(set(int(s) for s in sites)))
        missing = [s for s in ordered if s not in site_dims]
        if missing:
            raise SupportError(f"no local dimension known for sites {missing}")
        return cls(sites=ordered, dims=tuple(site_dims[s] for s in ordered))

    @property
    def site_dims(self) -> Dict[int, int]:
        return dict(zip(self.sites, self.dims))

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def contains(self, support: Iterable[int]) -> bool:
        own = set(self.sites)
        return all(s in own for s in support)


class LocalOperator(BaseModel):
    """An operator on the tensor product of the Hilbert spaces of ``support``.

    Attributes
    ----------
    support : tuple of int
        Sites in ascending order.
    dims : tuple of int
        Local dimension of each support site.
    matrix : numpy.ndarray | scipy.sparse matrix
        Square matrix in the canonical order of ``support``.
    hermitian : bool
        When set, self-adjointness is verified on construction.
    """

    support: Tuple[int, ...] = Field(description="Sites in ascending order.")
    dims: Tuple[int, ...] = Field(description="Local dimension of each support site.")
    matrix: Any = Field(description="Square matrix in canonical support order.")
    hermitian: bool = Field(default=False, description="Verified self-adjoint flag.")
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check(self) -> "LocalOperator":
        if len(self.support) != len(self.dims):
            raise ValueError("support and dims must have the same length")
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be strictly increasing")
        dim = math.prod(self.dims)
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match support dimension {dim}")
        if self.hermitian and not is_hermitian(self.matrix):
            raise ValueError(f"operator flagged Hermitian has defect {hermiticity_defect(self.matrix):.3e}")
        return self

    @classmethod
    def on_site(cls, site: int, matrix: np.ndarray, hermitian: bool = False) -> "LocalOperator":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(support=(int(site),), dims=(matrix.shape[0],), matrix=matrix, hermitian=hermitian)

    @classmethod
    def on_sites(
        cls, sites: Sequence[int], dims: Sequence[int], matrix: np.ndarray, hermitian: bool = False
    ) -> "LocalOperator":
        """Build from sites in arbitrary order, reordering factors to canonical order."""
        sites = [int(s) for s in sites]
        order = sorted(range(len(sites)), key=lambda i: sites[i])
        matrix = np.asarray(matrix, dtype=complex)
        if order != list(range(len(sites))):
            n = len(sites)
            tensor = matrix.reshape(tuple(dims) * 2)
            tensor = tensor.transpose(order + [n + i for i in order])
            matrix = tensor.reshape(matrix.shape)
        return cls(
            support=tuple(sites[i] for i in order),
            dims=tuple(int(dims[i]) for i in order),
            matrix=matrix,
            hermitian=hermitian,
        )

    @classmethod
    def zero(cls, volume: Volume) -> "LocalOperator":
        dim = volume.total_dim
        return cls(support=volume.sites, dims=volume.dims, matrix=np.zeros((dim, dim), dtype=complex), hermitian=True)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def site_dims(self) -> Dict[int, int]:
        return dict(zip(self.support, self.dims))

    @property
    def volume(self) -> Volume:
        return Volume(sites=self.support, dims=self.dims)

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def norm(self) -> float:
        return op_norm(self.matrix)

    def is_diagonal(self) -> bool:
        return is_diagonal(self.matrix)

    def dagger(self) -> "LocalOperator":
        return self.model_copy(update={"matrix": self.matrix.conj().T})

    def scaled(self, factor: complex) -> "LocalOperator":
        hermitian = self.hermitian and complex(factor).imag == 0
        return LocalOperator(support=self.support, dims=self.dims, matrix=self.matrix * factor, hermitian=hermitian)

    def on(self, volume: Volume, as_sparse: bool = False) -> "LocalOperator":
        """Re-express on a larger volume through :func:`embed`."""
        return LocalOperator(
            support=volume.sites,
            dims=volume.dims,
            matrix=embed(self, volume, as_sparse=as_sparse),
            hermitian=self.hermitian,
        )


@lru_cache(maxsize=256)
def _embedding_permutation(
    support: Tuple[int, ...], sites: Tuple[int, ...], dims: Tuple[int, ...]
) -> Optional[np.ndarray]:
    """Basis permutation from ``support + rest`` factor order to ``sites`` order.

    Returns ``None`` when the two orders coincide.
    """
    in_support = set(support)
    order = list(support) + [s for s in sites if s not in in_support]
    position = {s: i for i, s in enumerate(order)}
    axes = [position[s] for s in sites]
    if axes == list(range(len(sites))):
        return None
    dim_of = dict(zip(sites, dims))
    order_dims = [dim_of[s] for s in order]
    perm = np.arange(math.prod(order_dims)).reshape(order_dims).transpose(axes).ravel()
    perm.setflags(write=False)
    return perm


def embed(A: LocalOperator, V: Volume, as_sparse: bool = False) -> Union[np.ndarray, sparse.csr_matrix]:
    """Matrix of ``A ⊗ I`` on ``H_V`` in the canonical factor order of ``V``.

    Parameters
    ----------
    A : LocalOperator
        Operator with ``support(A) ⊆ V.sites``.
    V : Volume
        Target volume.
    as_sparse : bool, default=False
        Return a CSR matrix instead of a dense array.

    Returns
    -------
    numpy.ndarray | scipy.sparse.csr_matrix
        The embedded operator.

    Raises
    ------
    SupportError
        If ``A`` is not supported inside ``V`` or local dimensions disagree.
    ResourceLimitError
        If a dense result would exceed ``DENSE_LIMIT`` (``SPARSE_LIMIT`` for sparse).

    Examples
    --------
    >>> from mwmw.algebra.spins import SIGMA_Z
    >>> V = Volume(sites=(0, 1), dims=(2, 2))
    >>> np.real(np.diagonal(embed(LocalOperator.on_site(0, SIGMA_Z), V))).tolist()
    [1.0, 1.0, -1.0, -1.0]
    """
    if not V.contains(A.support):
        raise SupportError(f"support {A.support} is not contained in volume {V.sites}")
    vdims = V.site_dims
    if any(vdims[s] != d for s, d in zip(A.support, A.dims)):
        raise SupportError("local dimensions of operator and volume disagree")
    total = V.total_dim
    limit = app_config.SPARSE_LIMIT if as_sparse else app_config.DENSE_LIMIT
    if total > limit:
        raise ResourceLimitError(f"volume dimension {total} exceeds limit {limit}")
    rest_dim = total // A.dim
    perm = _embedding_permutation(A.support, V.sites, V.dims)
    if as_sparse:
        full = sparse.kron(sparse.csr_matrix(A.matrix), sparse.identity(rest_dim, format="csr"), format="csr")
        return full if perm is None else full[perm][:, perm]
    full = np.kron(A.dense(), np.eye(rest_dim))
    return full if perm is None else full[np.ix_(perm, perm)]


def embed_diagonal(diagonal: np.ndarray, support: Sequence[int], V: Volume) -> np.ndarray:
    """Diagonal of ``diag(diagonal) ⊗ I`` on ``V`` without forming matrices."""
    support = tuple(support)
    if not V.contains(support):
        raise SupportError(f"support {support} is not contained in volume {V.sites}")
    rest_dim = V.total_dim // len(diagonal)
    full = np.kron(np.asarray(diagonal), np.ones(rest_dim))
    perm = _embedding_permutation(support, V.sites, V.dims)
    return full if perm is None else full[perm]


def local_sum(
    operators: Sequence[LocalOperator], volume: Optional[Volume] = None, as_sparse: bool = False
) -> LocalOperator:
    """Sum of local operators on ``volume`` (default: union of their supports)."""
    if volume is None:
        site_dims: Dict[int, int] = {}
        for op in operators:
            site_dims.update(op.site_dims)
        volume = Volume.from_sites(site_dims.keys(), site_dims)
    if as_sparse:
        total = sparse.csr_matrix((volume.total_dim, volume.total_dim), dtype=complex)
    else:
        total = np.zeros((volume.total_dim, volume.total_dim), dtype=complex)
    for op in operators:
        total = total + embed(op, volume, as_sparse=as_sparse)
    hermitian = all(op.hermitian for op in operators)
    return LocalOperator(support=volume.sites, dims=volume.dims, matrix=total, hermitian=hermitian)


def partial_trace(rho: np.ndarray, V: Volume, keep: Union[Volume, Sequence[int]]) -> np.ndarray:
    """Trace out every site of ``V`` not in ``keep``.

    Examples
    --------
    >>> bell = np.zeros((4, 4)); bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    >>> np.allclose(partial_trace(bell, Volume(sites=(0, 1), dims=(2, 2)), [0]), np.eye(2) / 2)
    True
    """
    keep_sites = tuple(keep.sites) if isinstance(keep, Volume) else tuple(sorted(int(s) for s in keep))
    if not V.contains(keep_sites):
        raise SupportError(f"{keep_sites} is not a subvolume of {V.sites}")
    rho = np.asarray(rho)
    if rho.shape != (V.total_dim, V.total_dim):
        raise ValueError("density matrix does not match the volume dimension")
    n = len(V.sites)
    keep_axes = [V.sites.index(s) for s in keep_sites]
    rest_axes = [i for i in range(n) if i not in keep_axes]
    dk = math.prod(V.dims[i] for i in keep_axes)
    dr = math.prod(V.dims[i] for i in rest_axes)
    tensor = rho.reshape(V.dims * 2)
    tensor = tensor.transpose(keep_axes + rest_axes + [n + i for i in keep_axes] + [n + i for i in rest_axes])
    return np.einsum("ajbj->ab", tensor.reshape(dk, dr, dk, dr))
