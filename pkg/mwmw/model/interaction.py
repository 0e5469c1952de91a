"""Interactions ``Φ = (φ(Λ))`` on a finite lattice."""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator
import numpy as np

from mwmw.algebra.operators import LocalOperator, Volume, embed
from mwmw.errors import SupportError
from mwmw.geometry.lattice import Lattice


class Interaction(BaseModel):
    """Self-adjoint terms keyed by their support.

    Terms with the same support are merged at construction, so each support
    ``Λ`` carries exactly one ``φ(Λ)``. Terms are stored in lexicographic order
    of their supports.

    Attributes
    ----------
    lattice : Lattice
        Underlying lattice.
    terms : tuple of LocalOperator
        The local terms.
    name : str
        Model name, ``custom`` for file-defined interactions.
    k_claimed : int | None
        Claimed symmetry order.
    index_set_I : tuple of int
        Axes (1-based) excluded from the invariance claim.
    diagonal_symmetric : bool
        Every term is diagonal in the charge basis.
    """

    lattice: Lattice
    terms: Tuple[LocalOperator, ...] = Field(default=(), description="Local terms ordered by support.")
    name: str = Field(default="custom")
    k_claimed: Optional[int] = Field(default=None, ge=0)
    index_set_I: Tuple[int, ...] = Field(default=())
    diagonal_symmetric: bool = Field(default=False)
    params: Dict[str, float] = Field(default_factory=dict, description="Builder parameters, for reports.")
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @model_validator(mode="after")
    def _check(self) -> "Interaction":
        supports = [t.support for t in self.terms]
        if supports != sorted(supports) or len(set(supports)) != len(supports):
            raise ValueError("terms must have distinct supports in lexicographic order")
        for t in self.terms:
            if not t.hermitian:
                raise ValueError(f"term on {t.support} is not flagged self-adjoint")
            if t.support and (t.support[0] < 0 or t.support[-1] >= self.lattice.n_sites):
                raise SupportError(f"term support {t.support} is outside the lattice")
        return self

    @classmethod
    def from_terms(cls, lattice: Lattice, operators: Iterable[LocalOperator], **kwargs) -> "Interaction":
        """Merge operators with equal support and build the interaction."""
        merged: Dict[Tuple[int, ...], LocalOperator] = {}
        for op in operators:
            if op.support in merged:
                prev = merged[op.support]
                op = LocalOperator(
                    support=op.support, dims=op.dims, matrix=prev.dense() + op.dense(), hermitian=True
                )
            merged[op.support] = op
        terms = tuple(merged[s] for s in sorted(merged))
        return cls(lattice=lattice, terms=terms, **kwargs)

    @cached_property
    def term_index(self) -> Dict[int, Tuple[int, ...]]:
        """Map site to the positions of the terms whose support contains it."""
        index: Dict[int, List[int]] = {}
        for i, t in enumerate(self.terms):
            for s in t.support:
                index.setdefault(s, []).append(i)
        return {s: tuple(v) for s, v in index.items()}

    @cached_property
    def term_norms(self) -> Tuple[float, ...]:
        return tuple(t.norm() for t in self.terms)

    @cached_property
    def site_dims(self) -> Dict[int, int]:
        dims: Dict[int, int] = {}
        for t in self.terms:
            dims.update(t.site_dims)
        return dims

    @cached_property
    def range(self) -> float:
        """Largest Euclidean diameter of a term support."""
        best = 0.0
        for t in self.terms:
            for i, j in itertools.combinations(t.support, 2):
                best = max(best, self.lattice.distance(i, j))
        return best

    def terms_meeting(self, sites: Iterable[int]) -> Tuple[int, ...]:
        """Positions of the terms whose support meets ``sites``."""
        found = set()
        for s in sites:
            found.update(self.term_index.get(s, ()))
        return tuple(sorted(found))

    def terms_within(self, sites: Iterable[int]) -> Tuple[int, ...]:
        own = set(sites)
        return tuple(i for i, t in enumerate(self.terms) if own.issuperset(t.support))

    def _with_terms(self, terms: Tuple[LocalOperator, ...]) -> "Interaction":
        # fresh instance, cached properties must not leak through a copy
        fields = {name: getattr(self, name) for name in type(self).model_fields if name != "terms"}
        return Interaction(terms=terms, **fields)

    def scaled(self, factor: float) -> "Interaction":
        return self._with_terms(tuple(t.scaled(factor) for t in self.terms))

    def restricted(self, positions: Sequence[int]) -> "Interaction":
        """Sub-interaction made of the terms at ``positions``."""
        return self._with_terms(tuple(self.terms[i] for i in sorted(set(positions))))

    def plus(self, other: "Interaction") -> "Interaction":
        """Sum of two interactions on the same lattice (metadata of ``self`` kept)."""
        return Interaction.from_terms(
            self.lattice,
            list(self.terms) + list(other.terms),
            name=f"{self.name}+{other.name}",
            k_claimed=None,
            index_set_I=self.index_set_I,
        )


def surface_energy(phi: Interaction, X: Iterable[int], V: Volume) -> LocalOperator:
    """``h_X = Σ φ(Λ)`` over terms ``Λ ⊆ V`` with ``Λ ∩ X ≠ ∅``, as an operator on ``V``.

    Examples
    --------
    For an xy chain on sites ``0..5`` and ``X = {2}`` the bonds ``{1,2}`` and
    ``{2,3}`` contribute.
    """
    X = set(X)
    if not X.issubset(V.sites):
        raise SupportError("X must be contained in the volume")
    positions = [i for i in phi.terms_meeting(X) if V.contains(phi.terms[i].support)]
    total = np.zeros((V.total_dim, V.total_dim), dtype=complex)
    for i in positions:
        total += embed(phi.terms[i], V)
    return LocalOperator(support=V.sites, dims=V.dims, matrix=total, hermitian=True)
