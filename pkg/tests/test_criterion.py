"""Test surface energies, D_m, the closed-form bound, the entropy equality and m-sweeps."""

from typing import List

import pytest
import numpy as np

from mwmw.criterion import (
    MWBoundReport,
    SweepConfig,
    compute_Dm,
    compute_hm,
    compute_Qm,
    entropy_bound_report,
    geometric_factor,
    mw_bound_report,
    remainder_conjugation_check,
    rhs_bound,
    sweep,
    verdict,
)
from mwmw.cutoff import CutoffProfile
from mwmw.errors import PreconditionError, VolumeTooSmallError
from mwmw.geometry import lattice_from_points, make_hypercubic, make_slab
from mwmw.model import builtin_charges, builtin_interaction
from mwmw.symmetry import MultiIndex


PROFILE_1D = CutoffProfile(dim=1)
TEN_SITES = lattice_from_points([(x,) for x in range(-5, 5)])


def _report(m: float, triangle: float, rhs: float = 1e9) -> MWBoundReport:
    return MWBoundReport(
        m=m,
        a="0",
        s=1.0,
        k=1,
        Qm_size=int(4 * m + 1),
        Dm_norm_triangle=triangle,
        rhs_bound=rhs,
        geometric_factor=1.0,
        C_a=1.0,
        decay_sup=1.0,
        volume_dim=2,
    )


def test_xy_surface_energy_at_m1():
    """Test that Q_1 on a chain is {-2..2} and six bonds meet it."""
    lat = make_hypercubic(1, 8)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("xy_chain", {}, lat)
    assert [lat.points[i][0] for i in compute_Qm(cf, 1.0)] == [-2, -1, 0, 1, 2]
    assert compute_Dm(phi, cf, PROFILE_1D, (0,), 1.0, 1.0, mode="per_term").n_terms == 6
    V = cf.volume(tuple(range(lat.n_sites)))
    h = compute_hm(phi, cf, 1.0, V)
    assert np.allclose(h.dense(), h.dense().conj().T)


def test_surface_energy_needs_large_enough_volume():
    """Test that a volume missing Q_m reports the required sites."""
    lat = make_hypercubic(1, 8)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("xy_chain", {}, lat)
    with pytest.raises(VolumeTooSmallError) as info:
        compute_hm(phi, cf, 1.0, cf.volume((7, 8, 9)))
    assert len(info.value.required_sites) == 7


def test_rhs_bound_vanishes_at_zero_twist():
    """Test that s = 0 gives a zero bound."""
    assert rhs_bound((0,), 1, 0.0, 3.0, 1.0, 2.0, 9, 464.0) == 0.0


def test_rhs_bound_rejects_order_above_k():
    """Test that |a| > k is a precondition violation."""
    with pytest.raises(PreconditionError):
        rhs_bound((2,), 1, 1.0, 3.0, 1.0, 2.0, 9, 464.0)


@pytest.mark.parametrize("k,a_order,expected", [(1, 0, 9 / 16), (1, 1, 9 / 4), (0, 0, 9 / 4)])
def test_geometric_factor(k: int, a_order: int, expected: float):
    """Test |Q_m| / m^(2(k-|a|+1)) at m = 2."""
    assert geometric_factor(9, 2.0, k, a_order) == pytest.approx(expected)


@pytest.mark.parametrize("a", [(0,), (1,)])
@pytest.mark.parametrize("m", [2.0, 3.0])
def test_exact_within_triangle_within_bound(a, m: float):
    """Test ||D_m|| <= sum of per-term norms <= closed-form bound for the ring exchange."""
    cf = builtin_charges("spin_z_half", TEN_SITES)
    phi = builtin_interaction("dipole_hop4", {}, TEN_SITES)
    report = mw_bound_report(phi, cf, PROFILE_1D, a, 1.0, m, k=1)
    assert report.Dm_exact_method == "dense"
    assert report.exact_within_triangle()
    assert report.Dm_norm_triangle <= report.rhs_bound


@pytest.mark.parametrize("name", ["dipole_hop4", "symmetry_breaker"])
@pytest.mark.parametrize("a", [(0,), (1,)])
def test_entropy_equality(name: str, a):
    """Test S(rho||U rho U^dagger) + S(rho||U^dagger rho U) = beta Tr(rho D_m) on ten sites."""
    cf = builtin_charges("spin_z_half", TEN_SITES)
    phi = builtin_interaction(name, {}, TEN_SITES)
    V = cf.volume(tuple(range(TEN_SITES.n_sites)))
    assert V.total_dim == 1024
    report = entropy_bound_report(phi, cf, PROFILE_1D, a, 1.0, 2.0, beta=1.0, V=V)
    assert report.equality_holds(1e-8)
    assert report.S_fwd >= -1e-12
    assert report.S_bwd >= -1e-12


def test_symmetric_model_twist_vanishes_on_plateau():
    """Test that D_m of the ring exchange only picks up terms in the cutoff transition region."""
    lat = make_hypercubic(1, 12)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("dipole_hop4", {}, lat)
    result = compute_Dm(phi, cf, PROFILE_1D, (0,), 1.0, 2.0, mode="per_term")
    for term_id, value in zip(result.term_ids, result.per_term):
        coords = [lat.points[i][0] for i in phi.terms[term_id].support]
        if max(abs(c) for c in coords) <= 2:
            assert value == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("m", [2.0, 3.0])
def test_remainder_conjugation_on_transition_terms(m: float):
    """Test U phi U^dagger = exp(isW_R) phi exp(-isW_R) for ring-exchange terms straddling the transition."""
    lat = make_hypercubic(1, 10)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("dipole_hop4", {}, lat)
    checked = 0
    for term_id, term in enumerate(phi.terms):
        coords = [abs(lat.points[i][0]) for i in term.support]
        if max(coords) > m and min(coords) < 2 * m:
            report = remainder_conjugation_check(phi, cf, PROFILE_1D, (0,), 1, m, term_id)
            assert report.passed
            assert report.F_at_zero == pytest.approx(0.0, abs=1e-15)
            assert report.F_norm <= report.taylor_bound * (1 + 1e-9)
            checked += 1
    assert checked > 0


def test_remainder_conjugation_rejects_asymmetric_term():
    """Test that a term outside the symmetry class is refused."""
    lat = make_hypercubic(1, 6)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("xy_chain", {}, lat)
    with pytest.raises(PreconditionError):
        remainder_conjugation_check(phi, cf, PROFILE_1D, (0,), 1, 2.0, 0)


@pytest.mark.parametrize(
    "triangles,expected",
    [
        ([1.0, 1.0, 1.0, 1.0], "bounded"),
        ([2.0, 1.0, 0.5, 0.25], "bounded"),
        ([2.0, 4.0, 6.0, 8.0], "growing"),
    ],
)
def test_verdict_classifies_slopes(triangles: List[float], expected: str):
    """Test the log-log slope classification over the upper half of the sweep."""
    reports = [_report(m, t) for m, t in zip([2.0, 4.0, 6.0, 8.0], triangles)]
    assert verdict(reports).verdict == expected


def test_verdict_needs_two_points():
    """Test that a single row cannot be classified."""
    assert verdict([_report(2.0, 1.0)]).verdict == "undetermined"


def test_verdict_flags_rows_above_bound():
    """Test the within_bound flag."""
    assert not verdict([_report(2.0, 1.0, rhs=0.5), _report(3.0, 1.0)]).within_bound


@pytest.mark.parametrize(
    "symmetric,rhs,expected",
    [
        (True, 1e9, "bounded"),
        (False, 1e9, "growing"),
        (None, 1e9, "growing"),
        (True, 0.5, "growing"),
    ],
)
def test_verdict_uses_symmetry_and_bound(symmetric, rhs: float, expected: str):
    """Test that a slowly growing sum is bounded only for a k-symmetric interaction below its bound."""
    reports = [_report(m, t, rhs=rhs) for m, t in zip([2.0, 4.0, 6.0, 8.0], [15.0, 20.0, 26.0, 31.0])]
    result = verdict(reports, symmetric=symmetric)
    assert result.verdict == expected
    assert result.exponent > 0.05


def test_verdict_nonincreasing_after_burn_in():
    """Test that a sum which stops increasing before m* is bounded even with a steep early rise."""
    reports = [_report(m, t) for m, t in zip([2.0, 3.0, 4.0, 5.0], [1.0, 5.0, 4.0, 4.0])]
    result = verdict(reports, burn_in=3.0)
    assert result.nonincreasing_from == 3.0
    assert result.verdict == "bounded"
    assert result.reason == "nonincreasing"


@pytest.mark.parametrize("a", [(0,), (1,)])
def test_sweep_bounded_for_symmetric_model(a):
    """Test the ring exchange over m = 2..8: bounded, every triangle sum below its bound."""
    lat = make_hypercubic(1, 20)
    config = SweepConfig(
        phi=builtin_interaction("dipole_hop4", {}, lat),
        cf=builtin_charges("spin_z_half", lat),
        profile=PROFILE_1D,
        a=MultiIndex.of(a),
        k=1,
        m_values=[2, 3, 4, 5, 6, 7, 8],
        exact=False,
    )
    result = sweep(config)
    assert [r.m for r in result.reports] == [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    assert result.verdict.symmetric is True
    assert result.verdict.verdict == "bounded"
    assert result.verdict.within_bound
    assert all(r.Dm_norm_triangle <= r.rhs_bound for r in result.reports)
    assert all(r.verdict == "bounded" for r in result.reports)
    assert not result.truncated
    if a == (0,):
        assert result.verdict.nonincreasing_from <= 3.0


@pytest.mark.parametrize(
    "name,a",
    [
        ("symmetry_breaker", (0,)),
        ("xy_chain", (1,)),
    ],
)
def test_sweep_grows_when_symmetry_is_broken(name: str, a):
    """Test roughly linear growth when the twisted generator is not a symmetry."""
    lat = make_hypercubic(1, 20)
    config = SweepConfig(
        phi=builtin_interaction(name, {}, lat),
        cf=builtin_charges("spin_z_half", lat),
        profile=PROFILE_1D,
        a=MultiIndex.of(a),
        m_values=[2, 3, 4, 5, 6, 7, 8],
        exact=False,
    )
    result = sweep(config, threads=2)
    assert result.verdict.verdict == "growing"
    assert result.verdict.exponent >= 0.8
    assert all(r.verdict == "growing" for r in result.reports)


def test_slab_sweep_is_bounded():
    """Test the charge twist of the ring exchange on a two-row slab with the bounded axis excluded."""
    lat = make_slab(1, 20, [2])
    config = SweepConfig(
        phi=builtin_interaction("dipole_hop4", {"axis": 1}, lat, index_set_I=(2,)),
        cf=builtin_charges("spin_z_half", lat),
        profile=CutoffProfile(dim=2),
        a=MultiIndex.of((0, 0)),
        k=1,
        m_values=[2, 3, 4, 5, 6],
        exact=False,
    )
    result = sweep(config)
    assert result.verdict.verdict == "bounded"
    assert result.verdict.within_bound


def test_sweep_volume_holds_q_m():
    """Test that the exact mode on a long chain switches to the sparse norm."""
    lat = make_hypercubic(1, 20)
    cf = builtin_charges("spin_z_half", lat)
    phi = builtin_interaction("dipole_hop4", {}, lat)
    result = compute_Dm(phi, cf, PROFILE_1D, (0,), 1.0, 2.0)
    assert result.method == "eigsh"
    assert result.volume_dim == 2**15
    assert result.Qm_size == 9
    assert result.lower <= result.norm <= result.upper
