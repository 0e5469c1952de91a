"""Test lattices, ball counting and the growth condition."""

from typing import Tuple

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest
import numpy as np

from mwmw.geometry import (
    ball_count,
    box_sites,
    estimate_gamma,
    lattice_from_points,
    make_hypercubic,
    make_slab,
    verify_growth,
)
from mwmw.schemas import LatticeSpec


@pytest.mark.parametrize(
    "d,half_extent,expected_sites",
    [
        (1, 5, 11),
        (2, 3, 49),
        (3, 1, 27),
    ],
)
def test_hypercubic_site_count(d: int, half_extent: int, expected_sites: int):
    """Test that a hypercubic box has (2h+1)^d sites in lexicographic order."""
    lat = make_hypercubic(d, half_extent)
    assert lat.n_sites == expected_sites
    assert list(lat.points) == sorted(lat.points)


@pytest.mark.parametrize(
    "center,r,expected",
    [
        ((0, 0), 1.0, 1),
        ((0, 0), 1.5, 9),
        ((0, 0), 2.0, 9),
        ((0, 0), 2.01, 13),
        ((3, 3), 1.5, 4),
    ],
)
def test_ball_count_open_ball(center: Tuple[int, int], r: float, expected: int):
    """Test that balls are open: points at distance exactly r are excluded."""
    assert ball_count(make_hypercubic(2, 3), center, r) == expected


@settings(max_examples=30, deadline=None)
@given(r1=st.floats(min_value=0.0, max_value=4.0), dr=st.floats(min_value=0.0, max_value=3.0))
def test_ball_count_monotone(r1: float, dr: float):
    """Test that ball counts never decrease with the radius."""
    lat = make_hypercubic(2, 4)
    assert ball_count(lat, (0, 0), r1) <= ball_count(lat, (0, 0), r1 + dr)


@pytest.mark.parametrize(
    "d,C,gamma,passed",
    [
        (2, 9.0, 2.0, True),
        (1, 3.0, 1.0, True),
        (2, 1.0, 1.0, False),
    ],
)
def test_verify_growth(d: int, C: float, gamma: float, passed: bool):
    """Test the growth certificate on hypercubic boxes, including a violated claim with a witness."""
    report = verify_growth(make_hypercubic(d, 8), C, gamma, 1.0, [1, 2, 3, 4, 5, 6])
    assert report.passed is passed
    assert report.tested_range == (1.0, 6.0)
    if passed:
        assert report.worst_ratio <= 1.0
        assert report.witness is None
    else:
        assert report.witness is not None
        assert report.witness.count > report.witness.allowed


def test_verify_growth_rejects_radius_below_r0():
    """Test that grid radii below r0 are rejected."""
    with pytest.raises(ValueError):
        verify_growth(make_hypercubic(1, 3), 3.0, 1.0, 1.0, [0.5, 2.0])


@pytest.mark.parametrize("d", [1, 2])
def test_estimate_gamma_close_to_dimension(d: int):
    """Test that the log-log estimate recovers the box dimension away from the boundary."""
    estimate = estimate_gamma(make_hypercubic(d, 30), [4, 8, 12, 16, 20])
    assert estimate.label == "estimate"
    assert estimate.gamma == pytest.approx(d, abs=0.15)


def test_slab_bounds_and_growth():
    """Test that a slab records its bounded axes and behaves one-dimensionally."""
    lat = make_slab(1, 10, [2])
    assert lat.dim_ambient == 2
    assert lat.slab_bounds == {2: 1.0}
    assert lat.n_sites == 21 * 2
    assert verify_growth(lat, lat.growth.C, lat.growth.gamma, 1.0, [1, 2, 4, 8]).passed


def test_lattice_from_points_rejects_duplicates():
    """Test that explicit point lists must be pairwise distinct."""
    with pytest.raises(ValueError):
        lattice_from_points([(0,), (1,), (0,)])


@pytest.mark.parametrize("m,margin,expected", [(1, 0.0, 3), (2, 0.5, 5), (2, 1.0, 7)])
def test_box_sites(m: float, margin: float, expected: int):
    """Test sup-norm box selection with a margin."""
    assert len(box_sites(make_hypercubic(1, 10), m, margin)) == expected


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "hypercubic", "d": 2, "half_extent": 2},
        {"kind": "slab", "free_dims": 1, "free_extent": 3, "bounded_sizes": [2]},
        {"kind": "points", "points": [[0.0], [1.0], [3.0]], "gamma": 1.0},
    ],
)
def test_lattice_spec_round_trip(spec: dict):
    """Test that a lattice rebuilt from its spec has the same points."""
    lat = LatticeSpec(**spec).build()
    again = LatticeSpec.from_lattice(lat).build()
    assert again.points == lat.points
    assert np.array_equal(again.coords, lat.coords)
