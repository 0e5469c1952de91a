"""Test multipole generators, the symmetry action and the k-symmetry audit."""

import pytest
import numpy as np

from mwmw.algebra import LocalOperator, Volume, embed, op_norm
from mwmw.algebra.spins import S_MINUS, S_PLUS, SIGMA_X
from mwmw.cutoff import CutoffProfile
from mwmw.errors import PreconditionError, VolumeTooSmallError
from mwmw.geometry import make_hypercubic
from mwmw.model import builtin_charges, builtin_interaction
from mwmw.symmetry import (
    MultiIndex,
    apply_tau,
    build_truncated_unitary,
    check_generators_commute,
    check_k_symmetric,
    check_symmetry_commutes,
    multi_indices,
    q_sites,
    stabilization_check,
)


HALF = 6
LAT = make_hypercubic(1, HALF)
CF = builtin_charges("spin_z_half", LAT)


def _site(x: int) -> int:
    """Site index of the chain coordinate ``x``."""
    return x + HALF


def _hop(x: int) -> LocalOperator:
    return LocalOperator.on_sites((_site(x), _site(x + 1)), (2, 2), np.kron(S_PLUS, S_MINUS))


@pytest.mark.parametrize(
    "d,k,I,expected",
    [
        (1, 2, (), ["0", "1", "2"]),
        (2, 1, (), ["0,0", "0,1", "1,0"]),
        (2, 2, (2,), ["0,0", "1,0", "2,0"]),
    ],
)
def test_multi_indices(d: int, k: int, I, expected):
    """Test enumeration by degree, lexicographic within a degree, with excluded axes."""
    assert [str(a) for a in multi_indices(d, k, I)] == expected


@pytest.mark.parametrize("text,expected", [("1,0", (1, 0)), ("2", (2,))])
def test_multi_index_parsing(text: str, expected):
    """Test comma-separated multi-index parsing and the order property."""
    a = MultiIndex.of(text)
    assert a.a == expected
    assert a.order == sum(expected)


@pytest.mark.parametrize("s", [0.3, 1.0, -2.2])
def test_charge_conserving_hop_is_invariant(s: float):
    """Test that S+ S- on a bond is unchanged by the uniform rotation."""
    A = _hop(1)
    out = apply_tau(A, CF, (0,), s)
    assert op_norm(out.dense() - embed(A, out.volume)) <= 1e-12


@pytest.mark.parametrize("x", [-2, 0, 3])
@pytest.mark.parametrize("s", [0.3, 1.0, -2.2])
def test_dipole_action_phases_hop(x: int, s: float):
    """Test that the dipole rotation multiplies S+_x S-_(x+1) by exp(is) wherever the bond sits."""
    A = _hop(x)
    out = apply_tau(A, CF, (1,), s)
    assert op_norm(out.dense() - np.exp(1j * s) * embed(A, out.volume)) <= 1e-12


@pytest.mark.parametrize("s", [0.5, -1.3])
def test_single_site_truncated_unitary(s: float):
    """Test that a single charge of unit weight gives diag(exp(is), 1)."""
    lat = make_hypercubic(1, 0)
    cf = builtin_charges("spin_z_half", lat)
    U = build_truncated_unitary(cf, CutoffProfile(dim=1), (0,), s, 1.0, cf.volume((0,)))
    assert np.allclose(U.matrix(), np.diag([np.exp(1j * s), 1.0]))
    assert U.defect() <= 1e-12


def test_truncated_unitary_needs_q_m():
    """Test that a volume missing part of Q_m is rejected."""
    V = CF.volume((_site(0), _site(1)))
    with pytest.raises(VolumeTooSmallError):
        build_truncated_unitary(CF, CutoffProfile(dim=1), (0,), 0.5, 2.0, V)


def test_q_m_is_the_2m_box():
    """Test that Q_m collects onsite charges with |x| <= 2m."""
    assert q_sites(CF, 1.0) == tuple(_site(x) for x in range(-2, 3))


def test_dipole_hop4_is_1_symmetric():
    """Test the ring exchange commutes with the charge and dipole generators on every term."""
    phi = builtin_interaction("dipole_hop4", {}, LAT)
    report = check_k_symmetric(phi, CF, 1)
    assert report.passed
    assert report.max_defect <= 1e-12
    assert report.indices == ["0", "1"]


def test_xy_chain_breaks_dipole_symmetry():
    """Test that nearest-neighbour hopping conserves charge but not dipole moment."""
    phi = builtin_interaction("xy_chain", {}, LAT)
    assert check_k_symmetric(phi, CF, 0).passed
    report = check_k_symmetric(phi, CF, 1)
    assert not report.passed
    assert report.failed_indices() == ["1"]
    assert report.witnesses[0].defect_norm > 1e-3


def test_field_breaks_charge_symmetry():
    """Test that a transverse field already fails at order zero."""
    phi = builtin_interaction("symmetry_breaker", {}, LAT)
    assert not check_k_symmetric(phi, CF, 0, index_set_I=()).passed


@pytest.mark.parametrize("indices", [["0"], ["0", "1"], ["0", "1", "2"]])
def test_generators_commute(indices):
    """Test that multipole generators of onsite charges commute pairwise."""
    V = CF.volume(tuple(_site(x) for x in range(-2, 3)))
    report = check_generators_commute(CF, indices, V)
    assert report.passed
    assert report.pairs_checked == len(indices) * (len(indices) - 1) // 2


def test_stabilization_matches_tau():
    """Test that U_m^dagger A U_m stops depending on m once the plateau covers supp A."""
    A = LocalOperator.on_site(_site(1), SIGMA_X)
    report = stabilization_check(A, CF, CutoffProfile(dim=1), (1,), 0.7, [1, 2, 3, 4])
    assert report.m0 == 2
    assert report.passed
    assert report.tau_defect <= 1e-10


def test_stabilization_needs_reachable_m0():
    """Test that an m range below m0 is rejected."""
    A = LocalOperator.on_site(_site(4), SIGMA_X)
    with pytest.raises(PreconditionError):
        stabilization_check(A, CF, CutoffProfile(dim=1), (0,), 0.7, [1, 2])


@pytest.mark.parametrize("name,expected", [("dipole_hop4", True), ("symmetry_breaker", False)])
def test_dynamics_commutes_with_symmetry(name: str, expected: bool):
    """Test alpha_t(tau_s(A)) = tau_s(alpha_t(A)) for a symmetric model and its failure for a breaker."""
    lat = make_hypercubic(1, 3)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction(name, {}, lat)
    A = LocalOperator.on_site(3, SIGMA_X)
    V = cf.volume(tuple(range(lat.n_sites)))
    report = check_symmetry_commutes(phi, cf, (1,) if expected else (0,), 0.4, 0.8, A, V)
    assert report.plateau_covers_volume
    assert report.passed is expected
