"""Test local operators, embeddings, partial traces and norms."""

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest
import numpy as np
from scipy import sparse

from mwmw.algebra import (
    LocalOperator,
    Volume,
    embed,
    hermitian_exp,
    local_sum,
    matrix_log_psd,
    op_norm,
    op_norm_sparse,
    partial_trace,
)
from mwmw.algebra.spins import SIGMA_X, SIGMA_Z, kron_all
from mwmw.errors import ResourceLimitError, SupportError


def _random_op(rng: np.random.Generator, sites, dims) -> LocalOperator:
    dim = int(np.prod(dims))
    matrix = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return LocalOperator.on_sites(sites, dims, matrix)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**31 - 1), first=st.sampled_from([(0,), (2,), (1, 3), (0, 2)]))
def test_embedding_is_multiplicative(seed: int, first):
    """Test that embedding is an algebra homomorphism: embed(A)embed(B) = embed(AB) on a common support."""
    rng = np.random.default_rng(seed)
    V = Volume(sites=(0, 1, 2, 3), dims=(2, 3, 2, 2))
    dims = [V.site_dims[s] for s in first]
    A, B = _random_op(rng, first, dims), _random_op(rng, first, dims)
    AB = LocalOperator.on_sites(first, dims, A.dense() @ B.dense())
    assert np.allclose(embed(A, V) @ embed(B, V), embed(AB, V))


@pytest.mark.parametrize("sites", [(0, 2), (2, 0)])
def test_embedding_matches_kron(sites):
    """Test the canonical factor order against an explicit Kronecker product."""
    V = Volume(sites=(0, 1, 2), dims=(2, 2, 2))
    matrix = np.kron(SIGMA_X, SIGMA_Z)
    op = LocalOperator.on_sites(sites, (2, 2), matrix)
    expected = kron_all(SIGMA_X, np.eye(2), SIGMA_Z) if sites == (0, 2) else kron_all(SIGMA_Z, np.eye(2), SIGMA_X)
    assert np.allclose(embed(op, V), expected)


def test_sparse_and_dense_embeddings_agree():
    """Test that the CSR embedding equals the dense one."""
    rng = np.random.default_rng(7)
    V = Volume(sites=(0, 1, 2, 3), dims=(2, 2, 2, 2))
    op = _random_op(rng, (1, 3), (2, 2))
    assert np.allclose(embed(op, V, as_sparse=True).toarray(), embed(op, V))


def test_embed_outside_volume_raises():
    """Test that embedding into a volume missing a support site raises."""
    with pytest.raises(SupportError):
        embed(LocalOperator.on_site(5, SIGMA_Z), Volume(sites=(0, 1), dims=(2, 2)))


def test_dense_limit_raises(monkeypatch):
    """Test that the dense ceiling is enforced."""
    from mwmw.configs.settings import app_config

    monkeypatch.setattr(app_config, "DENSE_LIMIT", 8)
    with pytest.raises(ResourceLimitError):
        embed(LocalOperator.on_site(0, SIGMA_Z), Volume(sites=(0, 1, 2, 3), dims=(2, 2, 2, 2)))


def test_partial_trace_of_product_state():
    """Test that tracing out a factor of a product state returns the other factor."""
    rng = np.random.default_rng(3)
    X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = X @ X.conj().T
    a /= np.trace(a)
    b = np.diag([0.25, 0.75])
    V = Volume(sites=(0, 1), dims=(2, 2))
    assert np.allclose(partial_trace(np.kron(a, b), V, [0]), a)
    assert np.allclose(partial_trace(np.kron(a, b), V, [1]), b)


def test_local_sum_of_fields():
    """Test that a sum of single-site sigma_z has the expected spectrum."""
    ops = [LocalOperator.on_site(x, SIGMA_Z, hermitian=True) for x in range(3)]
    H = local_sum(ops)
    assert H.hermitian
    assert sorted(np.real(np.diagonal(H.dense())).tolist()) == [-3, -1, -1, -1, 1, 1, 1, 3]


def test_hermitian_flag_is_verified():
    """Test that a non-Hermitian matrix cannot be flagged Hermitian."""
    with pytest.raises(ValueError):
        LocalOperator.on_site(0, np.array([[0, 1], [0, 0]]), hermitian=True)


@pytest.mark.parametrize("n", [128, 512])
def test_sparse_norm_brackets_dense_norm(n: int):
    """Test that the ARPACK norm lies between its certified bounds and matches the dense value."""
    M = sparse.random(n, n, density=0.05, random_state=n, dtype=float)
    M = M + M.T
    estimate = op_norm_sparse(M)
    exact = op_norm(M.toarray())
    assert estimate.lower <= exact * (1 + 1e-9)
    assert exact <= estimate.upper * (1 + 1e-9)
    assert estimate.value == pytest.approx(exact, rel=1e-6)


def test_hermitian_exp_and_log_are_inverse():
    """Test log(exp(H)) = H for a random Hermitian H."""
    rng = np.random.default_rng(11)
    X = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    H = 0.5 * (X + X.conj().T)
    assert np.allclose(matrix_log_psd(hermitian_exp(H, 1.0)), H, atol=1e-10)
