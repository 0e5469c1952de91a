"""Seeded random instances for the exact finite-volume identities.

Instance ``i`` of every suite draws from ``numpy.random.default_rng(seed + i)``,
so a suite is reproducible from its seed alone.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Sequence

from pydantic import BaseModel
from tqdm import tqdm
import numpy as np

from mwmw.algebra.linalg import op_norm
from mwmw.algebra.operators import LocalOperator, Volume
from mwmw.model.charges import ChargeFamily
from mwmw.symmetry.multiindex import MultiIndex
from mwmw.thermal.entropy import (
    entropy_perturbation_identity,
    tracial_invariance_check,
    twist_identity,
    uhlmann_check,
)
from mwmw.thermal.gibbs import gibbs, kms_check


def random_hermitian(rng: np.random.Generator, dim: int, norm: Optional[float] = 1.0) -> np.ndarray:
    """GUE-like Hermitian matrix, rescaled to operator norm ``norm`` unless ``None``."""
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H = 0.5 * (X + X.conj().T)
    return H if norm is None else norm * H / op_norm(H)


def random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Complex Gaussian matrix with unit operator norm."""
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return X / op_norm(X)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    Q, R = np.linalg.qr(X)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))[None, :]


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Full-rank density matrix ``X X† / Tr``."""
    X = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


class SuiteRow(BaseModel):
    """One checked instance: both sides of the identity and their distance."""

    check: str
    instance_seed: int
    beta: Optional[float] = None
    label: str = ""
    lhs: Optional[float]
    rhs: float
    defect: float
    passed: bool


def _log_failures(rows: List[SuiteRow], name: str) -> None:
    failed = sum(not r.passed for r in rows)
    if failed:
        logging.warning("%d of %d %s checks failed", failed, len(rows), name)


def entropy_identity_suite(
    n_instances: int,
    n_qubits: int,
    betas: Sequence[float],
    seed: int,
    tol: float = 1e-9,
    progress: bool = False,
) -> List[SuiteRow]:
    """``S(ρ‖σ_W) = −β Tr(ρ W)`` and ``S(ρ‖UρU†) = β Tr(ρ(UHU† − H))`` for random H, W, U.

    Instance ``i`` uses ``β = betas[i % len(betas)]``; ``H`` and ``W`` have unit norm.
    """
    dim = 2**n_qubits
    rows: List[SuiteRow] = []
    for i in tqdm(range(n_instances), desc="Entropy identities", disable=not progress):
        rng = np.random.default_rng(seed + i)
        beta = float(betas[i % len(betas)])
        H, W, U = random_hermitian(rng, dim), random_hermitian(rng, dim), random_unitary(rng, dim)
        for name, report in (
            ("perturbation", entropy_perturbation_identity(H, W, beta, tol=tol)),
            ("twist", twist_identity(H, U, beta, tol=tol)),
        ):
            rows.append(
                SuiteRow(
                    check=name,
                    instance_seed=seed + i,
                    beta=beta,
                    lhs=report.lhs,
                    rhs=report.rhs,
                    defect=report.defect,
                    passed=report.passed,
                )
            )
    _log_failures(rows, "entropy identity")
    return rows


def kms_suite(
    n_pairs: int, n_qubits: int, betas: Sequence[float], seed: int, tol: float = 1e-9, progress: bool = False
) -> List[SuiteRow]:
    """``Tr(ρ A e^{-βH} B e^{βH}) = Tr(ρ B A)`` for random unit-norm ``A``, ``B``."""
    dim = 2**n_qubits
    rows: List[SuiteRow] = []
    for i in tqdm(range(n_pairs), desc="KMS pairs", disable=not progress):
        rng = np.random.default_rng(seed + i)
        beta = float(betas[i % len(betas)])
        state = gibbs(random_hermitian(rng, dim), beta)
        report = kms_check(state, random_matrix(rng, dim), random_matrix(rng, dim), tol=tol)
        rows.append(
            SuiteRow(
                check="kms",
                instance_seed=seed + i,
                beta=beta,
                lhs=report.lhs.real,
                rhs=report.rhs.real,
                defect=report.defect,
                passed=report.passed,
            )
        )
    _log_failures(rows, "KMS")
    return rows


def uhlmann_suite(
    n_pairs: int, n_qubits: int, n_kept: int, seed: int, slack: float = 1e-9, progress: bool = False
) -> List[SuiteRow]:
    """Restricted relative entropy against the full one on random full-rank pairs."""
    V2 = Volume(sites=tuple(range(n_qubits)), dims=(2,) * n_qubits)
    V1 = tuple(range(n_kept))
    rows: List[SuiteRow] = []
    for i in tqdm(range(n_pairs), desc="Monotonicity pairs", disable=not progress):
        rng = np.random.default_rng(seed + i)
        rho, sigma = random_density(rng, V2.total_dim), random_density(rng, V2.total_dim)
        report = uhlmann_check(rho, sigma, V2, V1, slack=slack)
        marginal, full = float(report.marginal), float(report.full)
        rows.append(
            SuiteRow(
                check="uhlmann",
                instance_seed=seed + i,
                label=f"keep {n_kept} of {n_qubits}",
                lhs=marginal,
                rhs=full,
                defect=max(0.0, marginal - full),
                passed=report.passed,
            )
        )
    _log_failures(rows, "monotonicity")
    return rows


def tracial_suite(
    cf: ChargeFamily,
    n_samples: int,
    indices: Sequence[MultiIndex],
    s_values: Sequence[float],
    seed: int,
    n_sites: int = 2,
    tol: float = 1e-12,
    progress: bool = False,
) -> List[SuiteRow]:
    """Invariance of the normalised trace under ``τ_s^{(a)}`` for random local observables.

    Observables act on the ``n_sites`` lattice sites closest to the origin.
    """
    order = np.argsort(np.linalg.norm(cf.lattice.coords, axis=1), kind="stable")
    sites = sorted(int(x) for x in order[:n_sites])
    dims = [cf.site_dims[x] for x in sites]
    dim = int(np.prod(dims))
    rows: List[SuiteRow] = []
    for i in tqdm(range(n_samples), desc="Tracial samples", disable=not progress):
        rng = np.random.default_rng(seed + i)
        A = LocalOperator.on_sites(sites, dims, random_matrix(rng, dim))
        V = cf.volume(cf.collar(A.support))
        for a in indices:
            for s in s_values:
                report = tracial_invariance_check(V, cf, a, s, A, tol=tol)
                rows.append(
                    SuiteRow(
                        check="tracial",
                        instance_seed=seed + i,
                        beta=0.0,
                        label=f"a={a} s={s:g}",
                        lhs=report.after,
                        rhs=report.before,
                        defect=report.defect,
                        passed=report.passed,
                    )
                )
    _log_failures(rows, "tracial")
    return rows

