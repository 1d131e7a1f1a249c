from __future__ import annotations

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from som3d import oracles
from som3d.planecut import (
    ALPHA_PRISM,
    QUARTER_PI,
    CutGeometry,
    PlaneCutParams,
    box_distributions,
    case_family,
    chord_length,
    cut_area,
    cut_rpe,
    expected_cut_quantities,
    frustum_volume,
    predicted_rpe,
    prismatoid_volume,
    small_side_volume,
    theorem2_constant,
    uniform_distributions,
)

deg = math.radians
angle = st.floats(0.0, QUARTER_PI)


def test_geometry_intermediates():
    g = CutGeometry.of(deg(30), deg(20), 2.0, x=0.5)
    assert g.x1 == pytest.approx(1.0)
    assert g.x2 == pytest.approx((math.cos(deg(30)) - math.sin(deg(30))))
    assert g.a == pytest.approx(math.tan(deg(20)))
    assert g.h == pytest.approx(0.5 * math.cos(deg(20)))
    assert 0.0 <= CutGeometry.of(QUARTER_PI, 0.1, 1.0).x2 < 1e-15


def test_params_validation():
    with pytest.raises(ValueError):
        PlaneCutParams(0.1, 1.0, 0.1)
    with pytest.raises(ValueError):
        PlaneCutParams(0.1, 0.1, -0.1)
    with pytest.raises(ValueError):
        PlaneCutParams(-0.1, 0.1, 0.1)
    with pytest.raises(ValueError):
        PlaneCutParams(0.1, 0.1, 0.1, eps=0.0)
    with pytest.raises(ValueError):
        cut_area(PlaneCutParams(5.0, 0.3, 0.3))


@pytest.mark.parametrize(
    "theta, alpha, family",
    [(deg(30), deg(20), 1), (deg(10), deg(15), 2), (deg(40), deg(10), 3), (deg(10), deg(40), 4)],
)
def test_case_family(theta, alpha, family):
    assert case_family(theta, alpha) == family


def test_chord_length_examples():
    assert chord_length(PlaneCutParams(0.3, QUARTER_PI, 0.0)) == pytest.approx(0.6)
    assert chord_length(PlaneCutParams(0.4, 1e-9, 0.0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        chord_length(PlaneCutParams(0.95, deg(30), 0.0))


def test_chord_length_band_oracle():
    points = 4 * 10**7
    est = oracles.band_chord_length(0.2, deg(30), points=points, seed=11)
    exact = chord_length(PlaneCutParams(0.2, deg(30), 0.0))
    # relative standard error of a hit count is 1/sqrt(hits)
    rel_se = 1 / math.sqrt(exact * 1e-3 * points)
    assert abs(est - exact) / exact <= 4 * rel_se


def test_triangle_regime_closed_form():
    th, al, x = deg(30), deg(20), 0.05
    expected = x**2 * (math.tan(th) + 1 / math.tan(th)) / (2 * math.sin(al))
    assert cut_area(PlaneCutParams(x, th, al)) == pytest.approx(expected, rel=1e-12)


def test_central_section_first_family():
    th, al = deg(25), deg(10)
    g = CutGeometry.of(th, al, 3.0)
    p = PlaneCutParams(g.x_max, th, al, 3.0)
    assert cut_area(p) == pytest.approx(9.0 / (math.cos(th) * math.cos(al)), rel=1e-12)
    assert small_side_volume(p) == pytest.approx(27.0 / 2, rel=1e-12)
    assert cut_rpe(p) == pytest.approx(0.5, abs=1e-12)


def test_thin_slab_area_example():
    th, al, x = deg(25), deg(10), 0.4
    slab = oracles.slab_area(x, th, al, thickness=1e-3, points=10**7, seed=3)
    assert cut_area(PlaneCutParams(x, th, al)) == pytest.approx(float(slab), abs=1e-4)
    assert cut_area(PlaneCutParams(x, th, al)) == pytest.approx(0.82670684004, rel=1e-10)


def test_volume_hit_or_miss_example():
    th, al, x = deg(20), deg(15), 0.5
    v, se = oracles.hit_or_miss_volume(x, th, al, points=10**7, seed=5)
    assert abs(small_side_volume(PlaneCutParams(x, th, al)) - v) <= 4 * se


def test_vanishing_corner():
    p = PlaneCutParams(0.0, deg(20), deg(15))
    assert cut_area(p) == 0.0 and small_side_volume(p) == 0.0 and cut_rpe(p) == 0.0


def test_frustum_volume():
    assert frustum_volume(2.0, 2.0, 3.0) == pytest.approx(6.0)
    assert frustum_volume(0.0, 6.0, 2.0) == pytest.approx(4.0)
    assert frustum_volume(1.0, 4.0, 3.0) == pytest.approx(7.0)
    with pytest.raises(ValueError):
        frustum_volume(-1.0, 1.0, 1.0)


def test_prismatoid_matches_frustum_on_similar_sections():
    # similar sections: area is quadratic in height, both rules are exact
    sa, sb, h = 1.0, 4.0, 3.0
    assert prismatoid_volume(sa, 2.25, sb, h) == pytest.approx(frustum_volume(sa, sb, h))


def _valid(theta, alpha, frac, eps=1.0):
    return PlaneCutParams(frac * CutGeometry.of(theta, alpha, eps).x_max, theta, alpha, eps)


@settings(max_examples=300, deadline=None)
@given(theta=angle, alpha=angle, frac=st.floats(0, 1), eps=st.floats(0.01, 100))
def test_formulas_match_vertex_sum(theta, alpha, frac, eps):
    # the vertex sum loses precision when a normal component vanishes
    if min(theta, alpha) < 1e-3:
        return
    p = _valid(theta, alpha, frac, eps)
    area, vol = oracles.vertex_sum(p.x, theta, alpha, eps)
    assert cut_area(p) == pytest.approx(float(area), abs=1e-9 * eps**2)
    assert small_side_volume(p) == pytest.approx(float(vol), abs=1e-9 * eps**3)


@settings(max_examples=200, deadline=None)
@given(theta=angle, alpha=angle)
def test_continuity_at_breakpoints(theta, alpha):
    g = CutGeometry.of(theta, alpha, 1.0)
    for b in (2 * g.a, g.x1, g.x1 + 2 * g.a, g.x1 + 2 * g.x2):
        if not 1e-6 < b < g.x_max - 1e-6:
            continue
        lo = PlaneCutParams(b * (1 - 1e-12), theta, alpha)
        hi = PlaneCutParams(b * (1 + 1e-12), theta, alpha)
        assert abs(cut_area(lo) - cut_area(hi)) <= 1e-9
        assert abs(small_side_volume(lo) - small_side_volume(hi)) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(theta=angle, alpha=angle)
def test_volume_monotone_and_half_at_center(theta, alpha):
    g = CutGeometry.of(theta, alpha, 1.0)
    vols = [small_side_volume(PlaneCutParams(x, theta, alpha)) for x in np.linspace(0, g.x_max, 41)]
    assert np.all(np.diff(vols) >= -1e-12)
    assert vols[-1] == pytest.approx(0.5, abs=1e-9)


def test_prism_limit_is_continuous():
    th = deg(30)
    for x in (0.2, 0.5, 0.68):
        below = PlaneCutParams(x, th, ALPHA_PRISM / 2)
        above = PlaneCutParams(x, th, ALPHA_PRISM * 2)
        assert cut_area(below) == pytest.approx(cut_area(above), rel=1e-5)
        assert small_side_volume(below) == pytest.approx(small_side_volume(above), abs=1e-6)
    vertical = PlaneCutParams(0.2, th, 0.0)
    assert cut_area(vertical) == pytest.approx(chord_length(vertical))


def test_rpe_flags_values_above_half(monkeypatch):
    import som3d.planecut as pc

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        cut_rpe(PlaneCutParams(0.1, 0.2, 0.2))
    monkeypatch.setattr(pc, "small_side_volume", lambda p: 0.6)
    with pytest.warns(RuntimeWarning):
        assert pc.cut_rpe(PlaneCutParams(0.1, 0.2, 0.2)) == 0.6


def test_densities_normalized():
    uniform_distributions().check_normalized()
    box_distributions(0.3, 0.4, 0.2, 1e-3).check_normalized()
    bad = uniform_distributions()
    from dataclasses import replace

    with pytest.raises(ValueError):
        replace(bad, pdf_theta=lambda t: 1.0).check_normalized()


def test_dirac_like_density_reproduces_point_values():
    x, th, al = 0.45, deg(25), deg(15)
    e = expected_cut_quantities(box_distributions(x, th, al, 1e-5))
    p = PlaneCutParams(x, th, al)
    assert e.area == pytest.approx(cut_area(p), rel=1e-4)
    assert e.rpe == pytest.approx(cut_rpe(p), rel=1e-4)


@pytest.mark.slow
def test_uniform_expectations_scale_with_eps():
    e1 = expected_cut_quantities(uniform_distributions(), 1.0)
    e7 = expected_cut_quantities(uniform_distributions(), 7.0)
    assert e7.area == pytest.approx(49 * e1.area, rel=1e-4)
    assert e7.rpe == pytest.approx(e1.rpe, rel=1e-4)
    assert sum(v[0] for v in e1.by_family.values()) == pytest.approx(e1.area, rel=1e-12)
    assert theorem2_constant(7.0) == pytest.approx(theorem2_constant(1.0), rel=1e-4)


def test_uniform_expectations_against_sampling():
    q = oracles.sample_theorem2(draws=10**6, seed=8)
    e = expected_cut_quantities(uniform_distributions())
    assert e.area == pytest.approx(q.area, rel=3e-3)
    assert e.rpe == pytest.approx(q.rpe, rel=3e-3)
    assert abs(e.rpe / e.area - q.value) <= 4 * q.stderr


def test_predicted_rpe():
    assert predicted_rpe(1.0, 1.0, 1.0) == pytest.approx(0.1649)
    assert predicted_rpe(5.0, 3.0, 8 * 17**3) == pytest.approx(predicted_rpe(5.0, 3.0, 17**3) / 2)
    assert predicted_rpe(0.0, 3.0, 27) == 0.0
    with pytest.raises(ValueError):
        predicted_rpe(1.0, 0.0, 8)
