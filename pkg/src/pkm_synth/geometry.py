"""Small exact 2D toolbox used by the kinematic model."""
from __future__ import annotations

import math
from typing import NamedTuple

from .errors import CoincidentCenters, NoIntersection

EPS_STRUCT = 1e-9
EPS_TANGENT = 1e-12


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Vec2(self.x - other[0], self.y - other[1])

    def __mul__(self, k):
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other) -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


def vec(x, y) -> Vec2:
    x, y = float(x), float(y)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite vector ({x}, {y})")
    return Vec2(x, y)


def unit(angle: float) -> Vec2:
    return Vec2(math.cos(angle), math.sin(angle))


def normalize_angle(a: float) -> float:
    """Representative of ``a`` in (-pi, pi]."""
    r = math.remainder(a, 2.0 * math.pi)
    return math.pi if r == -math.pi else r


def rotate90(v) -> Vec2:
    return Vec2(-v[1], v[0])


def circle_circle_intersection(c1, c2, r: float, side: int) -> Vec2:
    """Intersection of two circles of equal radius ``r``.

    ``side=+1`` picks the point left of the directed segment c1->c2.
    Tangent circles return the double root.
    """
    c1, c2 = Vec2(*c1), Vec2(*c2)
    v = c2 - c1
    dist = v.norm()
    if dist < EPS_STRUCT * r:
        raise CoincidentCenters(f"centers {c1} and {c2} coincide")
    half = 0.5 * dist
    h2 = r * r - half * half
    if h2 < 0.0:
        # tangency within round-off is accepted
        if h2 < -EPS_TANGENT * r * r:
            raise NoIntersection(f"|c1-c2|={dist} exceeds 2r={2 * r}")
        h2 = 0.0
    mid = c1 + v * 0.5
    n = rotate90(v) * (1.0 / dist)
    return mid + n * (math.copysign(1.0, side) * math.sqrt(h2))


def line_circle_intersection(origin, direction, center, r: float, branch: int) -> float:
    """Parameter ``t`` of ``origin + t*direction`` on the circle (center, r).

    ``branch=+1`` returns the larger root, ``-1`` the smaller one.
    """
    direction = Vec2(*direction)
    if abs(direction.norm() - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    rel = Vec2(*origin) - Vec2(*center)
    b = rel.dot(direction)
    disc = b * b - (rel.dot(rel) - r * r)
    if disc < 0.0:
        if disc < -EPS_TANGENT * r * r:
            raise NoIntersection("line misses circle")
        disc = 0.0
    return -b + math.copysign(1.0, branch) * math.sqrt(disc)
