import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morreylab.geometry import Ball, BallFamily, EmptyFamilyError, Resolution, dilate, geometric_grid, interval_points, tilde

centers = st.floats(-1e3, 1e3, allow_nan=False)
radii = st.floats(1e-3, 1e3, allow_nan=False)


def test_ball_basics():
    b = Ball(4.0, 1.0)
    assert (b.left, b.right, b.measure) == (3.0, 5.0, 2.0)
    assert b.contains(3.0) and b.contains(5.0) and not b.contains(5.0001)
    with pytest.raises(ValueError):
        Ball(0.0, 0.0)
    assert Ball.from_dict(b.to_dict()) == b


def test_tilde_examples():
    assert tilde(Ball(4, 1)) == Ball(0, 5)
    assert tilde(Ball(0, 3)) == Ball(0, 3)
    assert tilde(Ball(-4, 1)) == Ball(0, 5)


def test_dilate_examples():
    assert dilate(Ball(4, 1), 2) == Ball(4, 2)
    assert dilate(Ball(0, 1), 5) == Ball(0, 5)
    assert dilate(Ball(1, 2), 1) == Ball(1, 2)
    with pytest.raises(ValueError):
        dilate(Ball(0, 1), 0.0)


@given(centers, radii)
def test_tilde_contains_ball(c, r):
    b = Ball(c, r)
    t = tilde(b)
    assert t.center == 0.0 and t.radius == abs(c) + r
    assert t.left <= b.left and b.right <= t.right * (1 + 1e-15)


@given(centers, radii, st.floats(1.0, 100.0))
def test_tilde_of_dilate(c, r, lam):
    b = Ball(c, r)
    assert tilde(dilate(b, lam)).radius <= lam * tilde(b).radius * (1 + 1e-12)


def test_enumerate_examples():
    assert BallFamily("centered", 1.0, 1.0, points_per_decade=1).enumerate() == [Ball(0.0, 1.0)]
    bd = BallFamily("boundary", 1.0, 1.0, c_max=10.0, points_per_decade=1).enumerate()
    assert bd == [Ball(-4.0, 1.0), Ball(4.0, 1.0)]
    with pytest.raises(EmptyFamilyError):
        BallFamily("offcenter", 1.0, 2.0, c_max=4.0, points_per_decade=4).enumerate()


@pytest.mark.parametrize("kind", ["all", "centered", "offcenter", "boundary", "local"])
def test_enumerate_predicates_and_purity(kind):
    fam = BallFamily(kind, 1e-2, 1e2, c_max=1e3, points_per_decade=4)
    balls = fam.enumerate()
    assert balls == fam.enumerate()
    assert len(set(balls)) == len(balls)
    assert all(fam.admits(b) or kind == "boundary" for b in balls)
    if kind == "offcenter":
        assert all(abs(b.center) > 4 * b.radius for b in balls)
    if kind == "boundary":
        assert all(math.isclose(abs(b.center), 4 * b.radius) for b in balls)
    if kind in ("all", "offcenter", "local"):
        assert any(b.center < 0 for b in balls) and any(b.center > 0 for b in balls)


def test_refinement_has_neighbours():
    fam = BallFamily("centered", 1e-2, 1e2, points_per_decade=4)
    coarse, fine = fam.radii(), fam.refined(1).radii()
    step = 1.0 / fam.refined(1).points_per_decade
    for r in coarse:
        assert np.min(np.abs(np.log10(fine) - np.log10(r))) <= step + 1e-12


def test_family_from_dict_roundtrip():
    fam = BallFamily("local", 1e-3, 1e3, 1e4, 8, kappa=0.5)
    assert BallFamily.from_dict(fam.to_dict()) == fam
    with pytest.raises(ValueError):
        BallFamily.from_dict({"kind": "all", "bogus": 1})
    with pytest.raises(ValueError):
        BallFamily("cubes")


def test_geometric_grid_endpoints():
    g = geometric_grid(1e-2, 1e2, 4)
    assert g[0] == 1e-2 and g[-1] == 1e2 and np.all(np.diff(g) > 0)
    assert g.size == 17


def test_interval_points_cluster_at_anchor():
    pts = interval_points(-2.0, 2.0, 1.0, Resolution(depth=20), deep=[0.0])
    pos = pts[pts > 0]
    assert pos.min() <= 1e-19
    assert np.all(np.diff(pts) > 0)


def test_interval_points_skip_subnormal_gaps():
    pts = interval_points(-1.0, 1.0, 0.5, Resolution(), deep=[0.0], edges=[5e-324, -0.5, 0.5])
    assert np.all(np.diff(pts) > 4 * np.finfo(float).tiny)
