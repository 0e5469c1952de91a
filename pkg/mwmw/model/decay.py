"""Decay conditions on interactions, evaluated exactly on finite volumes."""

from __future__ import annotations

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field
import numpy as np

from mwmw.model.charges import ChargeFamily
from mwmw.model.ffunction import FFunction, power_law, sufficient_decay_exponent
from mwmw.model.interaction import Interaction


def _pair_sums(phi: Interaction) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Σ_{Λ∋x,y} ‖φ(Λ)‖ for every ordered pair that shares a term, lexicographic in (x, y)."""
    acc: Dict[Tuple[int, int], float] = {}
    for term, weight in zip(phi.terms, phi.term_norms):
        for x in term.support:
            for y in term.support:
                acc[(x, y)] = acc.get((x, y), 0.0) + weight
    keys = sorted(acc)
    xs = np.array([k[0] for k in keys], dtype=int)
    ys = np.array([k[1] for k in keys], dtype=int)
    return xs, ys, np.array([acc[k] for k in keys], dtype=float)


def _weighted_sup(phi: Interaction, F: FFunction) -> Tuple[float, Optional[int], Optional[int]]:
    xs, ys, sums = _pair_sums(phi)
    if sums.size == 0:
        return 0.0, None, None
    coords = phi.lattice.coords
    dist = np.linalg.norm(coords[xs] - coords[ys], axis=1)
    weights = F(dist)
    if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
        raise ValueError(f"F vanishes or is not finite at a needed distance (label {F.label})")
    ratios = sums / weights
    i = int(np.argmax(ratios))
    return float(ratios[i]), int(xs[i]), int(ys[i])


def f_norm(phi: Interaction, F: FFunction) -> float:
    """``sup_{x,y} F(D(x,y))^{-1} Σ_{Λ∋x,y} ‖φ(Λ)‖`` on the finite lattice.

    Examples
    --------
    A nearest-neighbour chain with unit bonds and ``F = (1+r)^{-3}`` gives 8,
    attained on neighbouring pairs.
    """
    return _weighted_sup(phi, F)[0]


class DecayKReport(BaseModel):
    """``sup_x Σ_{Λ∋x} ‖φ(Λ)‖ (Σ_{z: supp(n_z)∩Λ≠∅} |z−x|^{k+1})²``."""

    k: int
    sup_value: float
    argmax_site: Optional[int] = Field(default=None, description="First maximiser in canonical order.")
    argmax_point: Optional[Tuple[float, ...]] = None
    n_sites: int


def check_decay_k(phi: Interaction, cf: ChargeFamily, k: int) -> DecayKReport:
    """Evaluate the k-th order decay sum by enumeration of all terms."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    coords = phi.lattice.coords
    per_site = np.zeros(phi.lattice.n_sites)
    for term, weight in zip(phi.terms, phi.term_norms):
        touching = np.array(cf.charges_touching(term.support), dtype=int)
        for x in term.support:
            if touching.size:
                dist = np.linalg.norm(coords[touching] - coords[x], axis=1)
                inner = float(np.sum(dist ** (k + 1)))
            else:
                inner = 0.0
            per_site[x] += weight * inner**2
    if not phi.terms:
        return DecayKReport(k=k, sup_value=0.0, n_sites=phi.lattice.n_sites)
    x = int(np.argmax(per_site))
    return DecayKReport(
        k=k,
        sup_value=float(per_site[x]),
        argmax_site=x,
        argmax_point=phi.lattice.points[x],
        n_sites=phi.lattice.n_sites,
    )


class PowerDecayReport(BaseModel):
    """``sup_{x,y} (1+|x−y|)^{exponent} Σ_{Λ∋x,y} ‖φ(Λ)‖`` with its maximiser."""

    exponent: float
    value: float
    argmax_pair: Optional[Tuple[int, int]] = None
    n_sites: int
    note: str = ""


def check_decay_gamma(phi: Interaction, gamma: float, epsilon: float) -> PowerDecayReport:
    """Power-law decay with exponent ``gamma + 1 + epsilon``; equals :func:`f_norm` for that power law."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    exponent = gamma + 1.0 + epsilon
    value, x, y = _weighted_sup(phi, power_law(exponent))
    return PowerDecayReport(
        exponent=exponent,
        value=value,
        argmax_pair=None if x is None else (x, y),
        n_sites=phi.lattice.n_sites,
        note=f"checked at epsilon = {epsilon:g}",
    )


class SimpleDecayReport(PowerDecayReport):
    k: int
    gamma: float
    decay_k: Optional[DecayKReport] = Field(default=None, description="Cross-check of the k-th order decay sum.")
    consistent: Optional[bool] = Field(default=None, description="Both sums finite, as the implication requires.")


def check_simple_decay(
    phi: Interaction, k: int, gamma: float, cf: Optional[ChargeFamily] = None
) -> SimpleDecayReport:
    """Decay with exponent ``4 + 2k + 2gamma``.

    Finiteness of this sum implies the k-th order decay condition; when a
    charge family is supplied the implication is cross-checked with
    :func:`check_decay_k`.
    """
    exponent = sufficient_decay_exponent(k, gamma)
    value, x, y = _weighted_sup(phi, power_law(exponent))
    decay_k = check_decay_k(phi, cf, k) if cf is not None else None
    consistent = None
    if decay_k is not None:
        consistent = bool(np.isfinite(value) and np.isfinite(decay_k.sup_value))
    return SimpleDecayReport(
        exponent=exponent,
        value=value,
        argmax_pair=None if x is None else (x, y),
        n_sites=phi.lattice.n_sites,
        note="finite value implies the k-th order decay condition",
        k=k,
        gamma=gamma,
        decay_k=decay_k,
        consistent=consistent,
    )


class DecaySeries(BaseModel):
    """Simple-decay sup values over growing volumes."""

    half_extents: List[int]
    values: List[float]
    bounded: bool = Field(description="Relative change between the last two volumes below tol.")
    tol: float


def simple_decay_series(
    make_interaction: Callable[[int], Interaction],
    half_extents: Sequence[int],
    k: int,
    gamma: float,
    tol: float = 1e-3,
) -> DecaySeries:
    """Recompute :func:`check_simple_decay` on the interactions built for each half extent."""
    if len(half_extents) < 2:
        raise ValueError("need at least two volumes")
    values = [check_simple_decay(make_interaction(int(h)), k, gamma).value for h in sorted(half_extents)]
    change = abs(values[-1] - values[-2]) / max(1.0, abs(values[-2]))
    logging.info("Simple decay over %s: %s", list(half_extents), values)
    return DecaySeries(half_extents=sorted(int(h) for h in half_extents), values=values, bounded=change <= tol, tol=tol)
