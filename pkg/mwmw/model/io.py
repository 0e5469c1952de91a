"""Interaction JSON format.

``{"terms": [{"support": [...], "matrix_re": [[...]], "matrix_im": [[...]],
"coupling": float, "dims": [...]}], "builtin": {"name": str, "params": {...}},
"k_claimed": int | null, "index_set_I": [int]}``

Matrices are given in the canonical order of their own support. ``dims`` is
optional; without it every support site gets the same local dimension.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Union

from pydantic import BaseModel, Field, ValidationError
import numpy as np

from mwmw.algebra.operators import LocalOperator
from mwmw.errors import ConfigError
from mwmw.geometry.lattice import Lattice
from mwmw.model.interaction import Interaction
from mwmw.model.zoo import builtin_interaction, builtin_local_dim


class TermSpec(BaseModel):
    support: List[int] = Field(min_length=1)
    matrix_re: List[List[float]]
    matrix_im: Optional[List[List[float]]] = None
    coupling: float = 1.0
    dims: Optional[List[int]] = None

    def local_dims(self) -> List[int]:
        """``dims``, or the equal local dimension that fits the matrix size."""
        if self.dims is not None:
            return [int(d) for d in self.dims]
        n = len(self.support)
        size = len(self.matrix_re)
        local = round(size ** (1.0 / n))
        if local**n != size:
            raise ConfigError(f"term on {self.support}: cannot infer local dimensions from size {size}")
        return [local] * n


class BuiltinSpec(BaseModel):
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)


class InteractionSpec(BaseModel):
    terms: List[TermSpec] = Field(default_factory=list)
    builtin: Optional[BuiltinSpec] = None
    k_claimed: Optional[int] = Field(default=None, ge=0)
    index_set_I: List[int] = Field(default_factory=list)

    def local_dims(self) -> Set[int]:
        """Single-site dimensions used by the builtin model and the explicit terms."""
        dims = {d for term in self.terms for d in term.local_dims()}
        if self.builtin is not None:
            builtin_dim = builtin_local_dim(self.builtin.name)
            if builtin_dim is not None:
                dims.add(builtin_dim)
        return dims


def _term_from_spec(term: TermSpec) -> LocalOperator:
    re = np.asarray(term.matrix_re, dtype=float)
    im = np.zeros_like(re) if term.matrix_im is None else np.asarray(term.matrix_im, dtype=float)
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise ConfigError(f"term on {term.support}: matrix_re and matrix_im must be equal square arrays")
    dims = term.local_dims()
    try:
        return LocalOperator.on_sites(term.support, dims, term.coupling * (re + 1j * im), hermitian=True)
    except ValueError as exc:
        raise ConfigError(f"term on {term.support}: {exc}") from exc


def interaction_from_spec(spec: Union[InteractionSpec, Dict[str, Any]], lat: Lattice) -> Interaction:
    """Build an interaction from a parsed spec; builtin terms and explicit terms are added."""
    if not isinstance(spec, InteractionSpec):
        try:
            spec = InteractionSpec(**spec)
        except ValidationError as exc:
            raise ConfigError(f"invalid interaction: {exc}") from exc
    index_set_I = tuple(spec.index_set_I)
    explicit = [_term_from_spec(t) for t in spec.terms]
    if spec.builtin is None:
        return Interaction.from_terms(lat, explicit, k_claimed=spec.k_claimed, index_set_I=index_set_I)
    phi = builtin_interaction(spec.builtin.name, spec.builtin.params, lat, index_set_I=index_set_I)
    if explicit:
        phi = phi.plus(Interaction.from_terms(lat, explicit))
    if spec.k_claimed is not None:
        fields = {name: getattr(phi, name) for name in Interaction.model_fields}
        phi = Interaction(**{**fields, "k_claimed": spec.k_claimed})
    return phi


def load_interaction(path: Union[str, Path], lat: Lattice) -> Interaction:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read interaction file {path}: {exc}") from exc
    phi = interaction_from_spec(raw, lat)
    logging.info("Loaded interaction %s with %d terms from %s", phi.name, len(phi.terms), path)
    return phi


def dump_interaction(phi: Interaction) -> str:
    """Explicit-term JSON for ``phi`` (builtins are expanded into their terms)."""
    terms = []
    for t in phi.terms:
        m = t.dense()
        terms.append(
            {
                "support": list(t.support),
                "dims": list(t.dims),
                "matrix_re": np.real(m).tolist(),
                "matrix_im": np.imag(m).tolist(),
                "coupling": 1.0,
            }
        )
    payload = {"terms": terms, "k_claimed": phi.k_claimed, "index_set_I": list(phi.index_set_I)}
    return json.dumps(payload, sort_keys=True, indent=2)
