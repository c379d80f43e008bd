import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pkm_synth.errors import CoincidentCenters, NoIntersection
from pkm_synth.geometry import (
    Vec2,
    circle_circle_intersection,
    line_circle_intersection,
    normalize_angle,
    rotate90,
    unit,
    vec,
)

coord = st.floats(-100, 100, allow_nan=False)


@pytest.mark.parametrize("v, expected", [((1, 0), (0, 1)), ((0, 1), (-1, 0)), ((3, -2), (2, 3))])
def test_rotate90_examples(v, expected):
    assert rotate90(Vec2(*v)) == Vec2(*expected)


@given(coord, coord)
def test_rotate90_four_times_is_identity(x, y):
    v = Vec2(x, y)
    assert rotate90(rotate90(rotate90(rotate90(v)))) == v
    assert rotate90(v).dot(v) == pytest.approx(0.0, abs=1e-9)


def test_circle_circle_examples():
    r2 = math.sqrt(2.0)
    p = circle_circle_intersection((0, 0), (2, 0), r2, +1)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(1.0)
    p = circle_circle_intersection((0, 0), (2, 0), r2, -1)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(-1.0)
    p = circle_circle_intersection((0, 0), (2, 0), 1.0, +1)
    assert p.x == pytest.approx(1.0) and p.y == pytest.approx(0.0, abs=1e-12)


def test_circle_circle_errors():
    with pytest.raises(NoIntersection):
        circle_circle_intersection((0, 0), (3, 0), 1.0, +1)
    with pytest.raises(CoincidentCenters):
        circle_circle_intersection((1, 1), (1, 1), 1.0, +1)


@given(coord, coord, st.floats(0.1, 10), st.floats(0.05, 1.95), st.floats(-math.pi, math.pi),
       st.sampled_from([1, -1]))
def test_circle_circle_point_on_both(x, y, r, frac, ang, side):
    c1 = Vec2(x, y)
    c2 = c1 + unit(ang) * (frac * r)
    p = circle_circle_intersection(c1, c2, r, side)
    assert (p - c1).norm() == pytest.approx(r, rel=1e-9)
    assert (p - c2).norm() == pytest.approx(r, rel=1e-9)
    assert math.copysign(1, (c2 - c1).cross(p - c1)) == side


def test_line_circle_examples():
    r2 = math.sqrt(2.0)
    assert line_circle_intersection((0, 0), (1, 0), (1, 1), r2, +1) == pytest.approx(2.0)
    assert line_circle_intersection((0, 0), (1, 0), (1, 1), r2, -1) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(NoIntersection):
        line_circle_intersection((0, 0), (1, 0), (0, 2), 1.0, +1)


def test_line_circle_requires_unit_direction():
    with pytest.raises(ValueError):
        line_circle_intersection((0, 0), (2, 0), (0, 0), 1.0, +1)


@given(coord, coord, st.floats(-math.pi, math.pi), st.floats(0.1, 10), st.floats(-0.99, 0.99),
       st.sampled_from([1, -1]))
def test_line_circle_point_on_circle(x, y, ang, r, off, branch):
    origin = Vec2(x, y)
    d = unit(ang)
    center = origin + d * 3.0 + rotate90(d) * (off * r)
    t = line_circle_intersection(origin, d, center, r, branch)
    assert ((origin + d * t) - center).norm() == pytest.approx(r, rel=1e-9)


@given(st.floats(-50, 50))
def test_normalize_angle_range(a):
    n = normalize_angle(a)
    assert -math.pi < n <= math.pi
    assert math.cos(n) == pytest.approx(math.cos(a), abs=1e-9)
    assert math.sin(n) == pytest.approx(math.sin(a), abs=1e-9)


def test_vec_rejects_nonfinite():
    with pytest.raises(ValueError):
        vec(math.nan, 0)
