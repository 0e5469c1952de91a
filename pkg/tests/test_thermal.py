"""Test Gibbs states, relative entropy and the seeded identity suites."""

import pytest
import numpy as np

from mwmw.algebra import LocalOperator, Volume
from mwmw.algebra.spins import SIGMA_X
from mwmw.errors import PreconditionError, SupportError
from mwmw.geometry import make_hypercubic
from mwmw.model import builtin_charges, builtin_interaction
from mwmw.symmetry import MultiIndex
from mwmw.thermal import (
    GibbsState,
    entropy_identity_suite,
    entropy_perturbation_identity,
    gibbs,
    hamiltonian,
    kms_check,
    kms_suite,
    random_density,
    random_hermitian,
    random_matrix,
    relative_entropy,
    tracial_invariance_check,
    tracial_suite,
    twist_identity,
    uhlmann_suite,
)


def test_relative_entropy_pure_against_maximally_mixed():
    """Test S(|0><0| || I/2) = log 2."""
    report = relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2)
    assert not report.infinite
    assert report.value == pytest.approx(np.log(2.0), rel=1e-12)


def test_relative_entropy_support_mismatch_is_infinite():
    """Test that rho outside the support of sigma gives an infinite entropy."""
    report = relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0]))
    assert report.infinite
    assert report.value is None


def test_relative_entropy_rejects_unnormalised_sigma():
    """Test that Tr sigma != 1 needs an explicit opt-in."""
    with pytest.raises(PreconditionError):
        relative_entropy(np.eye(2) / 2, np.eye(2))
    assert relative_entropy(np.eye(2) / 2, np.eye(2), allow_unnormalized=True).value == pytest.approx(-np.log(2.0))


@pytest.mark.parametrize("c,beta", [(0.5, 1.0), (-1.0, 2.0)])
def test_scalar_perturbation_shifts_entropy(c: float, beta: float):
    """Test that W = c I gives S(rho || sigma_W) = -beta c."""
    H = random_hermitian(np.random.default_rng(1), 4)
    report = entropy_perturbation_identity(H, c * np.eye(4), beta)
    assert report.passed
    assert report.lhs == pytest.approx(-beta * c, abs=1e-10)


def test_twist_by_symmetry_is_zero():
    """Test that a unitary commuting with H leaves the Gibbs state unchanged."""
    H = np.diag([1.0, -0.5, 0.25, 2.0])
    U = np.diag(np.exp(1j * np.array([0.1, 0.7, -0.3, 1.1])))
    report = twist_identity(H, U, 1.5)
    assert report.passed
    assert report.lhs == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("beta", [0.5, 5.0, 500.0])
def test_kms_condition(beta: float):
    """Test the KMS identity, including a low temperature evaluated in the log domain."""
    rng = np.random.default_rng(2)
    state = gibbs(random_hermitian(rng, 8), beta)
    report = kms_check(state, random_matrix(rng, 8), random_matrix(rng, 8))
    assert report.passed
    assert report.log_domain is (beta == 500.0)


def test_entropy_identity_suite():
    """Test 100 seeded instances of both identities on three qubits."""
    rows = entropy_identity_suite(100, 3, [0.1, 1.0, 10.0], seed=20240517)
    assert len(rows) == 200
    assert sum(r.check == "perturbation" for r in rows) == 100
    assert all(r.passed for r in rows)
    assert max(r.defect for r in rows) <= 1e-9 * max(1.0, max(abs(r.rhs) for r in rows))


def test_entropy_identity_suite_is_reproducible():
    """Test that a suite is determined by its seed."""
    first = entropy_identity_suite(5, 2, [1.0], seed=7)
    second = entropy_identity_suite(5, 2, [1.0], seed=7)
    assert [r.model_dump() for r in first] == [r.model_dump() for r in second]


def test_kms_suite():
    """Test 50 seeded KMS pairs."""
    rows = kms_suite(50, 3, [0.1, 1.0, 10.0], seed=3)
    assert len(rows) == 50
    assert all(r.passed for r in rows)


def test_uhlmann_suite():
    """Test monotonicity of relative entropy under restriction on 50 random pairs."""
    rows = uhlmann_suite(50, 4, 2, seed=11)
    assert len(rows) == 50
    assert all(r.passed for r in rows)
    assert all(r.lhs <= r.rhs + 1e-9 for r in rows)


def test_tracial_suite():
    """Test that the normalised trace ignores every multipole action up to order two."""
    cf = builtin_charges("spin_z_half", make_hypercubic(1, 3))
    indices = [MultiIndex.of(a) for a in ("0", "1", "2")]
    rows = tracial_suite(cf, 10, indices, [0.3, 1.7], seed=5)
    assert len(rows) == 10 * 3 * 2
    assert all(r.passed for r in rows)


def test_tracial_invariance_with_truncated_unitary():
    """Test tracial invariance when the action is played by U_m on a volume containing Q_m."""
    lat = make_hypercubic(1, 3)
    cf = builtin_charges("spin_z_half", lat)
    V = Volume(sites=tuple(range(lat.n_sites)), dims=(2,) * lat.n_sites)
    A = LocalOperator.on_site(3, SIGMA_X)
    report = tracial_invariance_check(V, cf, (1,), 0.9, A, m=1.0)
    assert report.truncated
    assert report.passed
    assert report.before == pytest.approx(0.0, abs=1e-15)


def test_hamiltonian_rejects_cut_terms():
    """Test that a bond meeting the volume without fitting in it is an error unless dropped explicitly."""
    lat = make_hypercubic(1, 3)
    phi = builtin_interaction("xy_chain", {}, lat)
    V = Volume(sites=(2, 3, 4), dims=(2, 2, 2))
    with pytest.raises(SupportError):
        hamiltonian(phi, V)
    H = hamiltonian(phi, V, strict=False)
    assert H.shape == (8, 8)
    assert np.allclose(H, H.conj().T)
    w = np.linalg.eigvalsh(H)
    assert np.allclose(np.sort(w), np.sort(-w), atol=1e-12)


def test_hamiltonian_full_volume():
    """Test that every term fits when the volume is the whole lattice."""
    lat = make_hypercubic(1, 1)
    phi = builtin_interaction("xy_chain", {}, lat)
    V = Volume(sites=(0, 1, 2), dims=(2, 2, 2))
    w = np.linalg.eigvalsh(hamiltonian(phi, V))
    assert np.allclose(np.sort(w), np.sort(-w), atol=1e-12)


def test_kms_large_spread_for_non_gibbs_state():
    """Test that a state off-diagonal in the energy basis is checked at beta * spread = 3000 without overflow."""
    rng = np.random.default_rng(4)
    H = np.diag([0.0, 1.0, 2.0, 3.0])
    state = GibbsState(rho=random_density(rng, 4), beta=1000.0, H=H)
    A = random_matrix(rng, 4)
    report = kms_check(state, A, np.eye(4))
    assert not report.log_domain
    assert report.passed
    assert not kms_check(state, A, random_matrix(rng, 4)).passed
