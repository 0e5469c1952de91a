"""Test charge families, the model zoo, decay conditions and F-functions."""

import json

import pytest
import numpy as np
from scipy.special import zeta

from mwmw.errors import ConfigError
from mwmw.geometry import make_hypercubic
from mwmw.model import (
    builtin_charges,
    builtin_interaction,
    builtin_names,
    check_decay_k,
    check_f_function,
    check_simple_decay,
    dump_interaction,
    f_function_series,
    f_norm,
    interaction_from_spec,
    is_power_law_f_function,
    power_law,
    sufficient_decay_exponent,
    verify_charge_family,
)
from mwmw.model.io import InteractionSpec


@pytest.mark.parametrize(
    "kind,cutoff,N0,local_dim",
    [
        ("spin_z_half", None, 1.0, 2),
        ("boson_number", 3, 3.0, 4),
    ],
)
def test_builtin_charges_pass_verification(kind: str, cutoff, N0: float, local_dim: int):
    """Test that builtin onsite charge families satisfy every charge assumption."""
    lat = make_hypercubic(1, 4)
    cf = builtin_charges(kind, lat, cutoff)
    assert cf.N0 == N0
    assert cf.R0 == 0.5
    assert set(cf.site_dims.values()) == {local_dim}
    assert verify_charge_family(cf, lat).passed


def test_boson_charges_need_cutoff():
    """Test that boson charges without a cutoff are rejected."""
    with pytest.raises(ValueError):
        builtin_charges("boson_number", make_hypercubic(1, 2))


def test_zoo_lists_builtin_models():
    """Test that the registry discovers every builder module."""
    names = builtin_names()
    for name in ["dipole_hop4", "xy_chain", "heisenberg", "power_law_xy", "field_z", "symmetry_breaker"]:
        assert name in names


@pytest.mark.parametrize(
    "name,half_extent,n_terms,k_claimed",
    [
        ("xy_chain", 3, 6, 0),
        ("dipole_hop4", 3, 4, 1),
        ("symmetry_breaker", 3, 7, None),
    ],
)
def test_builtin_interaction_terms(name: str, half_extent: int, n_terms: int, k_claimed):
    """Test term counts and claimed orders of builtin models on short chains."""
    phi = builtin_interaction(name, {}, make_hypercubic(1, half_extent))
    assert len(phi.terms) == n_terms
    assert phi.k_claimed == k_claimed
    assert all(t.hermitian for t in phi.terms)


def test_unknown_builtin_raises():
    """Test that an unknown model name is reported with the available names."""
    with pytest.raises(ValueError, match="Available"):
        builtin_interaction("no_such_model", {}, make_hypercubic(1, 3))


def test_invalid_builtin_params_raise_config_error():
    """Test that builder parameters are validated."""
    with pytest.raises(ConfigError):
        builtin_interaction("dipole_hop4", {"axis": 0}, make_hypercubic(1, 3))


@pytest.mark.parametrize("J,expected", [(1.0, 464.0), (0.5, 232.0)])
def test_dipole_decay_sum(J: float, expected: float):
    """Test the k=1 decay sum of the ring exchange: 196 + 36 + 36 + 196 per interior site."""
    lat = make_hypercubic(1, 10)
    phi = builtin_interaction("dipole_hop4", {"J": J}, lat)
    report = check_decay_k(phi, builtin_charges("spin_z_half", lat), 1)
    assert report.sup_value == pytest.approx(expected, rel=1e-12)


def test_xy_chain_f_norm():
    """Test the F-norm of a unit nearest-neighbour chain with F = (1+r)^-3."""
    phi = builtin_interaction("xy_chain", {"J": 1.0}, make_hypercubic(1, 5))
    assert f_norm(phi, power_law(3.0)) == pytest.approx(8.0)


@pytest.mark.parametrize("name,params", [("xy_chain", {}), ("dipole_hop4", {}), ("power_law_xy", {"p": 12.0})])
def test_simple_decay_implies_decay_k(name: str, params: dict):
    """Test that a model passing the simple decay check also has a finite k-th order decay sum."""
    lat = make_hypercubic(1, 8)
    phi = builtin_interaction(name, params, lat)
    report = check_simple_decay(phi, 1, 1.0, builtin_charges("spin_z_half", lat))
    assert report.exponent == sufficient_decay_exponent(1, 1.0) == 8.0
    assert np.isfinite(report.value)
    assert report.consistent is True
    assert np.isfinite(report.decay_k.sup_value)


@pytest.mark.parametrize("lam,gamma,expected", [(3.0, 1.0, True), (2.0, 1.0, False), (3.5, 2.0, True)])
def test_power_law_admissibility(lam: float, gamma: float, expected: bool):
    """Test the lam > 1 + gamma criterion."""
    assert is_power_law_f_function(lam, gamma) is expected


def test_f_function_lambda3_norm():
    """Test that norm_F of (1+r)^-3 on a long chain approaches 2 zeta(3) - 1."""
    report = check_f_function(power_law(3.0), make_hypercubic(1, 5000))
    assert report.monotone
    assert report.norm_F == pytest.approx(2 * zeta(3) - 1, abs=1e-4)
    assert report.norm_F == pytest.approx(1.40411, abs=1e-4)
    assert np.isfinite(report.C_F)


def test_f_function_lambda1_grows():
    """Test that (1+r)^-1 on a chain more than doubles its norm between 10^2 and 10^4 sites."""
    series = f_function_series(power_law(1.0), 1, [50, 5000])
    assert series.growing
    assert series.growth_ratio > 2.0


def test_interaction_json_round_trip():
    """Test that dumped explicit terms rebuild the same interaction."""
    lat = make_hypercubic(1, 3)
    phi = builtin_interaction("xy_chain", {"J": 0.7}, lat)
    again = interaction_from_spec(json.loads(dump_interaction(phi)), lat)
    assert len(again.terms) == len(phi.terms)
    for a, b in zip(phi.terms, again.terms):
        assert a.support == b.support
        assert np.allclose(a.dense(), b.dense())


def test_interaction_spec_rejects_bad_matrix():
    """Test that a non-square explicit term is a configuration error."""
    lat = make_hypercubic(1, 3)
    spec = {"terms": [{"support": [0, 1], "matrix_re": [[1.0, 0.0]]}]}
    with pytest.raises(ConfigError):
        interaction_from_spec(spec, lat)


@pytest.mark.parametrize(
    "spec,expected",
    [
        ({"builtin": {"name": "dipole_hop4"}}, {2}),
        ({"terms": [{"support": [0], "matrix_re": np.eye(3).tolist()}]}, {3}),
        ({"terms": [{"support": [0, 1], "matrix_re": np.eye(6).tolist(), "dims": [2, 3]}]}, {2, 3}),
    ],
)
def test_interaction_spec_local_dims(spec, expected):
    """Test the single-site dimensions read from builtin models and explicit terms."""
    assert InteractionSpec(**spec).local_dims() == expected
