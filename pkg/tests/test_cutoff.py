"""Test the smooth cutoff, its exact derivatives and the Taylor remainder bound."""

from typing import Tuple

import pytest
import numpy as np

from mwmw.cutoff import (
    CutoffProfile,
    RemainderBound,
    check_slab_derivatives,
    compute_Ca,
    evaluate_cutoff,
    partial_derivative,
    profile_derivative,
    taylor_remainder_bound,
    taylor_remainder_exact,
)
from mwmw.errors import PreconditionError
from mwmw.geometry import make_slab


PROFILE_1D = CutoffProfile(dim=1)


@pytest.mark.parametrize("x,expected", [(0.0, 1.0), (1.0, 1.0), (-1.0, 1.0), (1.5, 0.5), (2.0, 0.0), (3.5, 0.0)])
def test_profile_values(x: float, expected: float):
    """Test the plateau, the symmetric midpoint of the bridge and the vanishing tail."""
    assert profile_derivative(0, np.array([x]))[0] == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_profile_derivatives_match_finite_differences(n: int):
    """Test the closed-form derivatives against central differences of the next lower order."""
    x = np.linspace(1.05, 1.95, 37)
    h = 1e-5
    numeric = (profile_derivative(n - 1, x + h) - profile_derivative(n - 1, x - h)) / (2 * h)
    assert np.allclose(profile_derivative(n, x), numeric, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("n", [1, 2])
def test_profile_derivatives_parity(n: int):
    """Test that odd derivatives are odd and even derivatives are even functions."""
    x = np.linspace(1.1, 1.9, 9)
    assert np.allclose(profile_derivative(n, -x), (-1) ** n * profile_derivative(n, x))


@pytest.mark.parametrize(
    "k,a",
    [
        (0, (0,)),
        (1, (0,)),
        (1, (1,)),
    ],
)
@pytest.mark.parametrize("m", [2.0, 4.0, 8.0])
def test_taylor_remainder_within_bound(k: int, a: Tuple[int, ...], m: float):
    """Test |R_{k+1}(x, z)| <= C_a m^-(k-|a|+1) |x - z|^(k+1) on 10^4 random pairs."""
    rng = np.random.default_rng(int(100 * m) + 10 * k + sum(a))
    x = rng.uniform(-3 * m, 3 * m, size=(10_000, 1))
    z = rng.uniform(-3 * m, 3 * m, size=(10_000, 1))
    rb = RemainderBound.for_profile(PROFILE_1D, a, k, m)
    exact = np.abs(taylor_remainder_exact(PROFILE_1D, m, a, k, x, z))
    bound = taylor_remainder_bound(rb, x, z)
    assert np.all(exact <= bound + 1e-12)


@pytest.mark.parametrize("k,a", [(0, (0,)), (1, (0,)), (1, (1,))])
def test_taylor_remainder_vanishes_on_plateau(k: int, a: Tuple[int, ...]):
    """Test that the remainder is zero when both points sit on the plateau."""
    m = 4.0
    rng = np.random.default_rng(5)
    x = rng.uniform(-m, m, size=(500, 1))
    z = rng.uniform(-m, m, size=(500, 1))
    assert np.allclose(taylor_remainder_exact(PROFILE_1D, m, a, k, x, z), 0.0, atol=1e-12)


@pytest.mark.parametrize("a", [(0,), (1,), (2,)])
@pytest.mark.parametrize("m", [2.0, 4.0, 8.0])
def test_weighted_cutoff_scaling(a: Tuple[int, ...], m: float):
    """Test chi_m^(a)(z) = m^|a| chi^(a)(z / m)."""
    z = np.linspace(-3 * m, 3 * m, 301)[:, None]
    lhs = np.asarray(evaluate_cutoff(PROFILE_1D, m, a, z))
    rhs = m ** sum(a) * np.asarray(evaluate_cutoff(PROFILE_1D, 1.0, a, z / m))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_compute_Ca_requires_order_at_most_k():
    """Test that |a| > k is a precondition violation."""
    with pytest.raises(PreconditionError):
        compute_Ca(PROFILE_1D, (2,), 1)


def test_compute_Ca_positive_and_independent_of_m():
    """Test that C_a is positive and enters the bound only through its prefactor."""
    C = compute_Ca(PROFILE_1D, (0,), 1)
    assert C > 0
    assert RemainderBound.for_profile(PROFILE_1D, (0,), 1, 4.0).prefactor == pytest.approx(C / 16.0)


def test_product_cutoff_partial_derivative():
    """Test that a mixed partial of the product cutoff factorises."""
    profile = CutoffProfile(dim=2)
    point = np.array([1.5, 1.25])
    mixed = partial_derivative(profile, 1.0, (0, 0), (1, 1), point)
    expected = profile_derivative(1, np.array([1.5]))[0] * profile_derivative(1, np.array([1.25]))[0]
    assert mixed == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("m,certified", [(1.0, False), (2.0, True), (3.5, True)])
def test_slab_derivatives(m: float, certified: bool):
    """Test that derivatives along a bounded axis vanish once m exceeds the slab width."""
    lat = make_slab(1, 12, [2])
    report = check_slab_derivatives(CutoffProfile(dim=2), m, (1, 0), [2], lat=lat)
    assert report.certified is certified
    assert report.max_abs_derivative == pytest.approx(0.0, abs=1e-12)


def test_slab_derivatives_reject_index_on_bounded_axis():
    """Test that a multi-index with a nonzero entry on an axis of I is rejected."""
    with pytest.raises(PreconditionError):
        check_slab_derivatives(CutoffProfile(dim=2), 2.0, (0, 1), [2], lat=make_slab(1, 4, [2]))
