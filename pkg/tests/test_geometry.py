from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PAPER_S
from som3d.geometry import (
    LicensedNetwork,
    Point3,
    Scene,
    boundary_surface_area,
    detect,
    radio_parameter_at,
    surface_area_estimate,
)

coord = st.floats(-2000, 2000, allow_nan=False)


def test_point_inside_networks_one_and_three(paper_scene):
    # (0, 0, 0) is in sphere 1; (500, 500, 0) is 707 from the origin, 707 from (0,1000,0)
    # and 707 from (1000,1000,0): inside network 3 only
    assert radio_parameter_at(paper_scene, (0, 0, 0)) == 1
    assert radio_parameter_at(paper_scene, (500, 500, 0)) == 4
    sc = Scene.from_spheres((0, 0, 0), 10, [((0, 0, 0), 2), ((9, 9, 9), 1), ((0, 0, 1), 2)])
    assert radio_parameter_at(sc, (0, 0, 0.5)) == 5


def test_empty_scene_is_zero(empty_scene):
    assert radio_parameter_at(empty_scene, (1, 2, 3)) == 0
    assert empty_scene.T == 0 and empty_scene.N == 1


def test_boundary_counts_as_inside():
    sc = Scene.from_spheres((0, 0, 0), 10, [((5, 5, 5), 2)])
    assert detect(sc, 1, (7, 5, 5)) == 1
    assert detect(sc, 1, (7.000001, 5, 5)) == 0


def test_detect_unknown_network():
    sc = Scene.from_spheres((0, 0, 0), 10, [((5, 5, 5), 2)])
    with pytest.raises(KeyError):
        detect(sc, 2, (0, 0, 0))


def test_array_evaluation_matches_scalar(paper_scene):
    rng = np.random.default_rng(3)
    pts = rng.random((50, 3)) * 1000
    arr = radio_parameter_at(paper_scene, pts)
    assert arr.dtype == np.int64
    assert [radio_parameter_at(paper_scene, p) for p in pts] == arr.tolist()
    assert radio_parameter_at(paper_scene, pts.reshape(5, 10, 3)).shape == (5, 10)


def test_invalid_construction():
    with pytest.raises(ValueError):
        LicensedNetwork(1, Point3(0, 0, 0), 0.0)
    with pytest.raises(ValueError):
        Scene(Point3(0, 0, 0), 0.0)
    with pytest.raises(ValueError):
        Scene(Point3(0, 0, 0), 1.0, (LicensedNetwork(2, Point3(0, 0, 0), 1.0),))


def test_with_network_appends_id():
    sc = Scene.from_spheres((0, 0, 0), 10, []).with_network((1, 1, 1), 3)
    assert sc.networks[0].id == 1 and sc.T == 1 and sc.N == 2


@settings(max_examples=200, deadline=None)
@given(p=st.tuples(coord, coord, coord), c=st.tuples(coord, coord, coord), r=st.floats(1, 1500))
def test_adding_network_keeps_lower_bits(paper_scene, p, c, r):
    before = radio_parameter_at(paper_scene, p)
    after = radio_parameter_at(paper_scene.with_network(c, r), p)
    assert after & 0b111 == before
    assert after >> 3 == detect(paper_scene.with_network(c, r), 4, p)


@settings(max_examples=200, deadline=None)
@given(
    k=st.integers(1, 3),
    u=st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)).filter(
        lambda v: math.hypot(*v) > 1e-3
    ),
)
def test_crossing_a_surface_flips_one_bit(paper_scene, k, u):
    net = paper_scene.networks[k - 1]
    u = np.asarray(u) / np.linalg.norm(u)
    inside = np.asarray(net.center) + u * net.radius * (1 - 1e-9)
    outside = np.asarray(net.center) + u * net.radius * (1 + 1e-9)
    diff = radio_parameter_at(paper_scene, inside) - radio_parameter_at(paper_scene, outside)
    assert diff == 1 << (k - 1)


def test_surface_area_unclipped_sphere():
    sc = Scene.from_spheres((0, 0, 0), 100, [((50, 50, 50), 20)])
    # every surface point is inside the box: the estimator is exact
    assert boundary_surface_area(sc, 1000, seed=1) == pytest.approx(4 * math.pi * 400, rel=1e-12)


def test_surface_area_corner_octant():
    sc = Scene.from_spheres((0, 0, 0), 100, [((0, 0, 0), 30)])
    est = surface_area_estimate(sc, 200_000, seed=2)
    exact = 4 * math.pi * 900 / 8
    assert abs(est.value - exact) <= 4 * est.stderr


def test_surface_area_paper_scene(paper_scene):
    est = surface_area_estimate(paper_scene, 10**6, seed=0)
    assert abs(est.value - PAPER_S) <= 4 * est.stderr
    assert est.stderr / PAPER_S < 2e-3


def test_surface_area_additive_for_disjoint_spheres():
    a = ((20, 20, 20), 15.0)
    b = ((0, 100, 50), 30.0)
    both = surface_area_estimate(Scene.from_spheres((0, 0, 0), 100, [a, b]), 100_000, seed=4)
    ea = surface_area_estimate(Scene.from_spheres((0, 0, 0), 100, [a]), 100_000, seed=5)
    eb = surface_area_estimate(Scene.from_spheres((0, 0, 0), 100, [b]), 100_000, seed=6)
    se = math.sqrt(both.stderr**2 + ea.stderr**2 + eb.stderr**2)
    assert abs(both.value - ea.value - eb.value) <= 3 * se


def test_surface_area_deterministic_and_validated(paper_scene):
    assert boundary_surface_area(paper_scene, 5000, 9) == boundary_surface_area(paper_scene, 5000, 9)
    with pytest.raises(ValueError):
        boundary_surface_area(paper_scene, 0)


def test_surface_area_chunking_does_not_change_result(paper_scene):
    a = surface_area_estimate(paper_scene, 10_000, seed=3, chunk=10_000)
    b = surface_area_estimate(paper_scene, 10_000, seed=3, chunk=999)
    assert a == b
