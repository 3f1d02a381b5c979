"""Planar primitives: bearings, convex hulls, perimeters and interior angles.

Points are handled as ``(x, y)`` float pairs or ``(n, 2)`` numpy arrays.
Hull orientation tests treat a turn as collinear when the sine of the turn
angle is below ``ORIENT_TOL``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateHullError, InvalidInputError

ORIENT_TOL = 1e-12

ZERO = (0.0, 0.0)


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f"non-finite coordinate: {v!r}")


def unit_bearing(p_i, p_j, visibility: float) -> tuple[float, float]:
    """Unit vector from ``p_i`` towards ``p_j``.

    Returns the zero vector when the two points coincide or are farther
    apart than ``visibility`` (the boundary distance is visible).
    """
    if not visibility > 0:
        raise InvalidInputError("visibility must be positive")
    xi, yi = float(p_i[0]), float(p_i[1])
    xj, yj = float(p_j[0]), float(p_j[1])
    _check_finite(xi, yi, xj, yj)
    dx, dy = xj - xi, yj - yi
    d = math.hypot(dx, dy)
    if d == 0.0 or d > visibility:
        return ZERO
    return (dx / d, dy / d)


@dataclass(frozen=True)
class HullSummary:
    vertices: tuple[tuple[float, float], ...]
    perimeter: float
    interior_angles: tuple[float, ...] = field(default=())

    @property
    def K(self) -> int:
        return len(self.vertices)

    @property
    def cos_sum(self) -> float:
        return math.fsum(math.cos(a) for a in self.interior_angles)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _left_turn(o, a, b) -> bool:
    return _cross(o, a, b) > 0.0


def _flat(prev, v, nxt) -> bool:
    """Interior angle at ``v`` within the orientation tolerance of pi."""
    ax, ay = prev[0] - v[0], prev[1] - v[1]
    bx, by = nxt[0] - v[0], nxt[1] - v[1]
    c = ax * by - ay * bx
    return (ax * bx + ay * by < 0
            and abs(c) <= ORIENT_TOL * math.hypot(ax, ay) * math.hypot(bx, by))


def hull_vertices(points) -> list[tuple[float, float]]:
    """Counter-clockwise hull vertices (monotone chain).

    Exactly coincident points collapse to one.  The chain uses the plain
    cross-product sign; afterwards any vertex whose angle is within the
    relative tolerance ``ORIENT_TOL`` of pi is removed as collinear.  Starts at the lexicographically smallest point.
    """
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if not pts:
        raise InvalidInputError("convex hull of an empty point set")
    for p in pts:
        _check_finite(*p)
    if len(pts) <= 2:
        return pts
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and not _left_turn(lower[-2], lower[-1], p):
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and not _left_turn(upper[-2], upper[-1], p):
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    # the chain never tests its start point; drop flat vertices cyclically
    i = 0
    while len(hull) > 2 and i < len(hull):
        if _flat(hull[i - 1], hull[i], hull[(i + 1) % len(hull)]):
            del hull[i]
            i = max(i - 1, 0)
        else:
            i += 1
    if len(hull) < 3:
        # collinear within tolerance: keep the two farthest-apart points
        a = max(pts, key=lambda q: math.dist(q, pts[0]))
        b = max(pts, key=lambda q: math.dist(q, a))
        return sorted([a, b])
    k = hull.index(min(hull))
    return hull[k:] + hull[:k]


def perimeter(vertices) -> float:
    """Closed-tour length; a two-vertex hull counts its segment twice."""
    k = len(vertices)
    if k < 2:
        return 0.0
    return math.fsum(
        math.dist(vertices[i], vertices[(i + 1) % k]) for i in range(k)
    )


def interior_angles(vertices) -> list[float]:
    """Interior angle at each vertex of a convex counter-clockwise polygon."""
    k = len(vertices)
    if k < 3:
        raise DegenerateHullError(f"interior angles need >= 3 vertices, got {k}")
    out = []
    for i in range(k):
        o = vertices[i]
        a = vertices[i - 1]
        b = vertices[(i + 1) % k]
        ax, ay = a[0] - o[0], a[1] - o[1]
        bx, by = b[0] - o[0], b[1] - o[1]
        out.append(math.atan2(abs(ax * by - ay * bx), ax * bx + ay * by))
    return out


def convex_hull(points) -> HullSummary:
    """Hull summary with the degenerate conventions used for the perimeter.

    One distinct point gives ``K=1`` and perimeter 0.  Collinear points give
    ``K=2``, perimeter twice the segment length and two zero angles, which is
    the limit of a flattening triangle.
    """
    verts = hull_vertices(points)
    k = len(verts)
    if k == 1:
        angles: tuple[float, ...] = ()
    elif k == 2:
        angles = (0.0, 0.0)
    else:
        angles = tuple(interior_angles(verts))
    return HullSummary(tuple(verts), perimeter(verts), angles)


def point_in_convex(point, vertices, tol: float = 1e-9) -> bool:
    """True if ``point`` lies inside or on a CCW convex polygon."""
    k = len(vertices)
    if k == 1:
        return math.dist(point, vertices[0]) <= tol
    for i in range(k):
        a, b = vertices[i], vertices[(i + 1) % k]
        edge = math.dist(a, b)
        if _cross(a, b, point) < -tol * max(edge, 1.0):
            return False
    if k == 2:
        # segment: also require the point to lie between the endpoints
        a, b = vertices
        t = ((point[0] - a[0]) * (b[0] - a[0]) + (point[1] - a[1]) * (b[1] - a[1]))
        return -tol <= t <= math.dist(a, b) ** 2 + tol
    return True


def regular_polygon(n: int, circumradius: float, phase: float = 0.0) -> np.ndarray:
    """Vertices of a regular n-gon centred at the origin, CCW."""
    a = phase + 2.0 * np.pi * np.arange(n) / n
    return circumradius * np.column_stack([np.cos(a), np.sin(a)])
