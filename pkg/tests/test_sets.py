import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from proxgeo.errors import AmbiguousProjection, DomainError, InvalidSet, OutsideReach, UnsupportedVariant
from proxgeo.sets import (
    AffineFlat,
    BallComplement,
    ImplicitLevelSet,
    ParallelPlanes,
    Sphere,
    check_weak_convexity_support,
    ellipsoid,
    project,
    set_distance,
    set_from_json,
    set_to_json,
    torus,
    verify_prox_smoothness_sampled,
)
from proxgeo.spindle import Spindle, spindle_contains

E1 = [1.0, 0.0, 0.0]

ANALYTIC = {
    "sphere": lambda: Sphere([0.0, 0.0, 0.0], 1.0, 1.0),
    "flat": lambda: AffineFlat([0.0, 0.0, 1.0], [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 1.0),
    "planes": lambda: ParallelPlanes(E1, (0.0, 2.0), 1.0),
    "ball_complement": lambda: BallComplement([0.0, 0.0, 0.0], 1.0, 1.0),
    "ellipsoid": lambda: ImplicitLevelSet(ellipsoid([1.5, 1.0, 0.8]), 0.4),
    "torus": lambda: ImplicitLevelSet(torus(2.0, 0.5), 0.5),
}


def torus_projection(x, major, minor):
    """Closed-form nearest point on a torus around the z-axis."""
    ring = major * np.array([x[0], x[1], 0.0]) / math.hypot(x[0], x[1])
    v = x - ring
    return ring + minor * v / np.linalg.norm(v)


def test_distance_examples():
    assert set_distance(Sphere([0, 0, 0], 1.0, 1.0), [2, 0, 0]) == pytest.approx(1.0)
    assert set_distance(ParallelPlanes(E1, (0.0, 2.0), 1.0), [1.0, 0.3, -2.0]) == pytest.approx(1.0)
    assert set_distance(AffineFlat([0, 0], [[1, 0]], 1.0), [3, 4]) == pytest.approx(4.0)


def test_projection_examples():
    s = Sphere([0, 0, 0], 1.0, 1.0)
    assert np.allclose(project(s, [0.5, 0, 0]).point, [1, 0, 0])
    planes = ParallelPlanes(E1, (0.0, 2.0), 1.0)
    p = project(planes, [0.3, 1.0, 2.0]).point
    assert np.allclose(p, [0.0, 1.0, 2.0])
    with pytest.raises(AmbiguousProjection):
        project(s, [0, 0, 0])


def test_projection_outside_reach():
    s = Sphere([0, 0, 0], 1.0, 1.0)
    with pytest.raises(OutsideReach):
        project(s, [3.0, 0, 0])


def test_radius_enforced():
    with pytest.raises(InvalidSet):
        Sphere([0, 0, 0], 1.0, 1.5)
    with pytest.raises(InvalidSet):
        ParallelPlanes(E1, (0.0, 2.0), 1.2)
    with pytest.raises(InvalidSet):
        BallComplement([0, 0], 1.0, 2.0)
    with pytest.raises(InvalidSet):
        ImplicitLevelSet(ellipsoid([2.0, 1.0]), 1.0)
    assert Sphere([0, 0, 0], 1.0, 1.5, unchecked_radius=True).R == 1.5
    assert AffineFlat([0, 0], [[1, 0]], 1e6).R == 1e6


def test_support_condition_examples():
    s = Sphere([0, 0, 0], 1.0, 1.0)
    res = check_weak_convexity_support(s, [0.5, 0, 0])
    assert res.passed and abs(res.margin) < 1e-12
    flat = AffineFlat([0, 0, 0], [[1, 0, 0]], 5.0)
    res = check_weak_convexity_support(flat, [1.0, 2.0, -1.0])
    assert res.passed and res.margin >= -1e-12
    inflated = Sphere([0, 0, 0], 1.0, 2.0, unchecked_radius=True)
    res = check_weak_convexity_support(inflated, [0, 0, 0.5])
    assert not res.passed and res.margin < 0
    # probe lands at the antipode, which is in the set
    assert np.allclose(res.support_center, [0, 0, -1])
    with pytest.raises(DomainError):
        check_weak_convexity_support(s, [1.0, 0, 0])


def test_prox_smoothness_examples():
    s = Sphere([0, 0, 0], 1.0, 1.0)
    eps = 1e-3
    b = np.array([-math.cos(eps), math.sin(eps), 0.0])
    rep = verify_prox_smoothness_sampled(s, [([1.0, 0, 0], b)])
    assert rep.passed and rep.found == 1
    planes = ParallelPlanes(E1, (0.0, 2.0), 1.0)
    rep = verify_prox_smoothness_sampled(planes, [([0, 0, 0], [0, 1.5, 0.5])])
    assert rep.found == 1
    rep = verify_prox_smoothness_sampled(planes, [([0, 0, 0], [2.0, 0, 0])])
    assert rep.skipped == 1 and rep.passed


@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_projection_lands_in_set_and_is_idempotent(name, rng):
    s = ANALYTIC[name]()
    for x in s.sample_near(rng, 40, 0.7 * s.R):
        r = project(s, x)
        assert s.contains(r.point)
        assert np.linalg.norm(x - r.point) == pytest.approx(r.distance, abs=1e-9)
        again = project(s, r.point)
        assert np.linalg.norm(again.point - r.point) < 1e-8 * s.R
        assert again.distance < 1e-8 * s.R


@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_sampled_points_satisfy_support_condition(name, rng):
    s = ANALYTIC[name]()
    for x in s.sample_near(rng, 30, 0.9 * s.R):
        if set_distance(s, x) < 1e-6:
            continue
        assert check_weak_convexity_support(s, x, tol=1e-7).passed


def test_torus_projection_matches_closed_form(rng):
    s = ImplicitLevelSet(torus(2.0, 0.5), 0.5)
    for x in s.sample_near(rng, 50, 0.45):
        assert np.allclose(project(s, x).point, torus_projection(x, 2.0, 0.5), atol=1e-9)


def test_ellipsoid_projection_beats_dense_sampling(rng):
    fn = ellipsoid([1.5, 1.0, 0.8])
    s = ImplicitLevelSet(fn, 0.4)
    u = rng.standard_normal((200000, 3))
    cloud = np.array([1.5, 1.0, 0.8]) * u / np.linalg.norm(u, axis=1, keepdims=True)
    for x in s.sample_near(rng, 10, 0.35):
        d = project(s, x).distance
        brute = np.linalg.norm(cloud - x, axis=1).min()
        assert d <= brute + 1e-12
        assert brute - d < 2e-2


@pytest.mark.parametrize("name", ["sphere", "flat", "planes", "ball_complement"])
def test_inscribed_segment_depth(name, rng):
    s = ANALYTIC[name]()
    R = s.R
    pts = s.sample(rng, 200)
    checked = 0
    for a, b in zip(pts[::2], pts[1::2]):
        d = np.linalg.norm(a - b)
        if not 0 < d < 2 * R:
            continue
        lam = rng.uniform(0.01, 0.99)
        x = lam * a + (1 - lam) * b
        bound = R - math.sqrt(R * R - lam * (1 - lam) * d * d)
        assert set_distance(s, x) <= bound + 1e-9
        assert spindle_contains(Spindle(a, b, R), project(s, x).point, 1e-9)
        checked += 1
    assert checked > 10


@given(st.sampled_from(["sphere", "flat", "planes", "ball_complement"]), st.integers(0, 2**31))
def test_projection_lipschitz_property(name, seed):
    s = ANALYTIC[name]()
    r = np.random.default_rng(seed)
    x1, x2 = s.sample_near(r, 2, 0.75 * s.R)
    p1, p2 = project(s, x1), project(s, x2)
    bound = 2 * s.R / (2 * s.R - p1.distance - p2.distance) * np.linalg.norm(x1 - x2)
    assert np.linalg.norm(p1.point - p2.point) <= bound + 1e-9


@pytest.mark.parametrize("name", sorted(ANALYTIC))
def test_json_round_trip(name):
    s = ANALYTIC[name]()
    back = set_from_json(set_to_json(s))
    assert type(back) is type(s) and back.R == s.R
    x = np.array([0.3, -0.2, 0.9])
    assert set_distance(back, x) == pytest.approx(set_distance(s, x))


def test_json_errors():
    with pytest.raises(UnsupportedVariant):
        set_from_json({"variant": "cube", "R": 1.0})
    with pytest.raises(InvalidSet):
        set_from_json({"variant": "sphere", "R": 1.0})
    inflated = set_from_json(
        {"variant": "sphere", "center": [0, 0, 0], "radius": 1.0, "R": 2.0, "unchecked_radius": True}
    )
    assert set_to_json(inflated)["unchecked_radius"] is True
