import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from proxgeo.curves import Polyline, r_arclength, r_arclength_polyline
from proxgeo.errors import DegenerateRadialDirection
from proxgeo.folding import (
    FoldFrame,
    fold,
    fold_many,
    folded_arclength_lower_bound,
    radial_project_to_circle,
)
from proxgeo.spindle import Spindle, main_arc

coords = st.floats(-5, 5, allow_nan=False)


def test_fold_examples():
    fr = FoldFrame([1.0, 1.0, 1.0], [0.0, 0.0, 2.0])
    assert fold(fr, [1.0, 1.0, 4.0]) == pytest.approx((3.0, 0.0))
    w = np.array([2.0, 0.0, 0.0])
    assert fold(fr, fr.origin + fr.axis + w) == pytest.approx((1.0, 2.0))


def test_fold_preserves_distance_in_common_half_plane(rng):
    fr = FoldFrame([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    u = np.array([0.0, 0.6, 0.8])
    for _ in range(50):
        x = rng.uniform(-3, 3) * fr.axis + rng.uniform(0, 3) * u
        y = rng.uniform(-3, 3) * fr.axis + rng.uniform(0, 3) * u
        fx, fy = np.array(fold(fr, x)), np.array(fold(fr, y))
        assert np.linalg.norm(fx - fy) == pytest.approx(np.linalg.norm(x - y), abs=1e-12)


@given(arrays(float, 4, elements=coords), arrays(float, 4, elements=coords),
       arrays(float, 4, elements=coords), arrays(float, 4, elements=coords))
def test_fold_non_expansive(o, axis, x, y):
    if np.linalg.norm(axis) < 1e-3:
        return
    F = fold_many(FoldFrame(o, axis), [x, y])
    assert np.linalg.norm(F[0] - F[1]) <= np.linalg.norm(x - y) + 1e-12


def test_radial_projection_examples():
    c = np.array([1.0, -2.0])
    on = c + 3.0 * np.array([0.6, 0.8])
    assert np.allclose(radial_project_to_circle(on, c, 3.0), on)
    far = c + 6.0 * np.array([0.0, 1.0])
    assert np.allclose(radial_project_to_circle(far, c, 3.0), c + [0.0, 3.0])
    with pytest.raises(DegenerateRadialDirection):
        radial_project_to_circle(c, c, 1.0)


@given(st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi), st.floats(1, 5), st.floats(1, 5))
def test_radial_projection_non_expansive_outside(t1, t2, r1, r2):
    c = np.zeros(2)
    x1 = r1 * np.array([math.cos(t1), math.sin(t1)])
    x2 = r2 * np.array([math.cos(t2), math.sin(t2)])
    y1, y2 = radial_project_to_circle(x1, c, 1.0), radial_project_to_circle(x2, c, 1.0)
    assert np.linalg.norm(y1 - y2) <= np.linalg.norm(x1 - x2) + 1e-12


def test_folded_bound_examples():
    a, b, R = np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.5, 0.0]), 1.3
    assert folded_arclength_lower_bound(a, b, [], R) == pytest.approx(r_arclength(a, b, R))
    sp = Spindle(a, b, R)
    w = np.array([0.0, 0.0, 1.0])
    arc = main_arc(sp, w, 12).vertices
    assert abs(folded_arclength_lower_bound(a, b, arc[1:-1], R) - r_arclength(a, b, R)) < 1e-9
    far = [b + 1.5 * sp.axis + 2.0 * w]
    assert folded_arclength_lower_bound(a, b, far, R) > r_arclength(a, b, R)


@given(arrays(float, (5, 3), elements=st.floats(-1, 1)), st.integers(0, 2**31))
def test_fold_shrinks_r_arclength(X, seed):
    R = 2.0
    fr = FoldFrame(np.random.default_rng(seed).standard_normal(3), [1.0, 0.3, -0.2])
    F = fold_many(fr, X)
    before = r_arclength_polyline(Polyline(X), R)
    after = r_arclength_polyline(Polyline(F), R)
    assert after <= before + 1e-12
