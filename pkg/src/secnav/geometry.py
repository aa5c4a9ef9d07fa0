"""Planar convex hulls and point-inclusion tests for safe-corridor segments.

Two hull constructions are provided, Graham's scan and Chan's output-sensitive
algorithm.  Both return the strict hull (no collinear boundary points) in
counter-clockwise order starting from the lowest point, leftmost on ties, so
their outputs can be compared vertex by vertex.

Hull construction decides every turn with the exact sign of the cross
product, so nearly collinear float input still has a single, well-defined
hull.  :func:`orientation` keeps an absolute tolerance for callers that want
near-collinear triples reported as collinear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateInput

#: absolute tolerance on the cross product before declaring three points collinear
ORIENT_EPS = 1e-12
#: points within this signed distance outside an edge still count as inside
BOUNDARY_EPS = 1e-9


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    """Coerce ``p`` to a :class:`Point2`, rejecting NaN and infinities."""
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point: ({x}, {y})")
    return Point2(x, y)


def cross(o, a, b) -> float:
    """Twice the signed area of triangle ``o, a, b`` (positive for a left turn)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _exact_cross(o, a, b) -> Fraction:
    """Exact cross product of float inputs.

    Every float is an integer over a power of two, so scaling all six
    coordinates to the largest denominator gives exact integer arithmetic.
    """
    ratios = [float(v).as_integer_ratio() for v in (o[0], o[1], a[0], a[1], b[0], b[1])]
    den = max(d for _, d in ratios)
    ox, oy, ax, ay, bx, by = (n * (den // d) for n, d in ratios)
    return Fraction((ax - ox) * (by - oy) - (ay - oy) * (bx - ox), den * den)


def orientation(o, a, b, eps: float = ORIENT_EPS) -> int:
    """+1 for a left turn, -1 for a right turn, 0 when |cross| <= eps.

    The comparison against ``eps`` is made on the exact cross product, so the
    answer does not depend on rounding in the float evaluation.
    """
    l = (a[0] - o[0]) * (b[1] - o[1])
    r = (a[1] - o[1]) * (b[0] - o[0])
    c = l - r
    # error bound in the spirit of Shewchuk's orient2d filter, with slack
    err = 1e-15 * (abs(l) + abs(r))
    if c > eps + err:
        return 1
    if c < -eps - err:
        return -1
    if abs(c) < eps - err:
        return 0
    e = _exact_cross(o, a, b)
    if e > eps:
        return 1
    if e < -eps:
        return -1
    return 0


def exact_sign(o, a, b) -> int:
    """Exact sign of :func:`cross`, falling back to rationals when floats are unsure."""
    l = (a[0] - o[0]) * (b[1] - o[1])
    r = (a[1] - o[1]) * (b[0] - o[0])
    c = l - r
    if abs(c) > 1e-15 * (abs(l) + abs(r)):
        return 1 if c > 0 else -1
    e = _exact_cross(o, a, b)
    return (e > 0) - (e < 0)


def _dist2(a, b) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


@dataclass(frozen=True)
class ConvexHullPolygon:
    """Strictly convex polygon, vertices counter-clockwise from the lowest point."""

    vertices: tuple[Point2, ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DegenerateInput("a hull needs at least three vertices")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    def edges(self):
        vs = self.vertices
        n = len(vs)
        for i in range(n):
            yield vs[i], vs[(i + 1) % n]

    def is_convex(self) -> bool:
        vs = self.vertices
        n = len(vs)
        return all(exact_sign(vs[i - 1], vs[i], vs[(i + 1) % n]) > 0 for i in range(n))


@dataclass(frozen=True)
class PathSegment:
    points: tuple[Point2, ...]
    sequence_index: int

    def __post_init__(self):
        if self.sequence_index < 0:
            raise ValueError("sequence_index must be >= 0")
        if len(self.points) < 3:
            raise DegenerateInput("a path segment needs at least three points")


def _distinct(points: Iterable) -> list[Point2]:
    return list(dict.fromkeys(as_point(p) for p in points))


def _pivot(pts: Sequence[Point2]) -> Point2:
    return min(pts, key=lambda p: (p[1], p[0]))


def _graham(pts: list[Point2]) -> list[Point2]:
    """Graham's scan on distinct points; may return fewer than 3 vertices."""
    if len(pts) < 3:
        return sorted(pts, key=lambda p: (p[1], p[0]))
    p0 = _pivot(pts)

    # every decision uses the exact sign: a tolerance makes "collinear"
    # non-transitive and the hull would depend on the processing order
    def by_angle(a, b):
        o = exact_sign(p0, a, b)
        if o:
            return -o
        da, db = _dist2(p0, a), _dist2(p0, b)
        return (da > db) - (da < db)

    rest = sorted((p for p in pts if p != p0), key=cmp_to_key(by_angle))
    stack = [p0]
    for p in rest:
        keep = True
        while len(stack) >= 2:
            o = exact_sign(stack[-2], stack[-1], p)
            if o > 0:
                break
            # right turns pop; on a collinear tie the farther point survives
            if o < 0 or _dist2(stack[-2], p) >= _dist2(stack[-2], stack[-1]):
                stack.pop()
            else:
                keep = False
                break
        if keep:
            stack.append(p)
    while len(stack) >= 3 and exact_sign(stack[-2], stack[-1], p0) <= 0:
        stack.pop()
    return stack


def graham_scan(points) -> ConvexHullPolygon:
    """Convex hull by Graham's scan.

    Parameters
    ----------
    points : iterable of (x, y)
        Input cloud. Duplicates are ignored.

    Returns
    -------
    ConvexHullPolygon
        Extreme points only, counter-clockwise from the lowest-then-leftmost one.

    Raises
    ------
    DegenerateInput
        Fewer than three distinct points, or all points collinear.
    """
    pts = _distinct(points)
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 distinct points, got {len(pts)}")
    hull = _graham(pts)
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexHullPolygon(tuple(hull))


def _better(p, q, r) -> bool:
    """True if ``r`` beats ``q`` as the next wrapping vertex after ``p``."""
    o = exact_sign(p, q, r)
    if o < 0:
        return True
    return o == 0 and _dist2(p, r) > _dist2(p, q)


class _MiniHull:
    """One group's hull plus a cursor that remembers the last tangent found."""

    def __init__(self, verts: list[Point2]):
        self.verts = verts
        self.index = {v: i for i, v in enumerate(verts)}
        self.cursor = 0

    def tangent(self, p: Point2) -> Point2 | None:
        vs = self.verts
        n = len(vs)
        i = self.index.get(p)
        if i is not None:
            if n == 1:
                return None
            self.cursor = (i + 1) % n
            return vs[self.cursor]
        if n <= 2:
            best = vs[0]
            for v in vs[1:]:
                if _better(p, best, v):
                    best = v
            return best
        # From a point outside a convex polygon the wrapping order along the
        # boundary is unimodal, so hill-climbing from the previous tangent
        # reaches the global best; the cursor only advances as p wraps around.
        c = self.cursor
        while True:
            nxt = (c + 1) % n
            prv = (c - 1) % n
            if _better(p, vs[c], vs[nxt]):
                c = nxt
            elif _better(p, vs[c], vs[prv]):
                c = prv
            else:
                break
        self.cursor = c
        return vs[c]


def _wrap(groups: list[_MiniHull], start: Point2, limit: int) -> list[Point2] | None:
    hull = [start]
    p = start
    for _ in range(limit):
        best = None
        for g in groups:
            q = g.tangent(p)
            if q is None or q == p:
                continue
            if best is None or _better(p, best, q):
                best = q
        if best is None or best == start:
            return hull
        hull.append(best)
        p = best
    return None


def chan_hull(points, initial_guess: int = 4) -> ConvexHullPolygon:
    """Convex hull by Chan's algorithm.

    The cloud is split into groups of at most ``m`` points, each group is hulled
    with Graham's scan, and a gift-wrapping pass over the group hulls is allowed
    ``m`` steps to close the polygon.  When it fails to close, ``m`` is doubled
    and the whole round is repeated.

    Output matches :func:`graham_scan` exactly: same vertices, same order.
    """
    pts = _distinct(points)
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 distinct points, got {len(pts)}")
    start = _pivot(pts)
    m = max(3, int(initial_guess))
    while True:
        groups = [_MiniHull(_graham(pts[i:i + m])) for i in range(0, len(pts), m)]
        hull = _wrap(groups, start, m)
        if hull is not None:
            break
        m *= 2
    if len(hull) < 3:
        raise DegenerateInput("all points are collinear")
    return ConvexHullPolygon(tuple(hull))


def signed_edge_distances(p, hull: ConvexHullPolygon) -> list[float]:
    """Signed distance of ``p`` to the supporting line of every hull edge.

    Positive values are on the inner (left) side of the counter-clockwise edge.
    """
    out = []
    for a, b in hull.edges():
        length = math.hypot(b[0] - a[0], b[1] - a[1])
        out.append(cross(a, b, p) / length)
    return out


def point_in_convex_hull(p, hull: ConvexHullPolygon, eps: float = BOUNDARY_EPS) -> bool:
    """Inclusion test; boundary points (within ``eps`` metres) count as inside."""
    px, py = p[0], p[1]
    vs = hull.vertices
    ax, ay = vs[-1]
    for bx, by in vs:
        ex, ey = bx - ax, by - ay
        c = ex * (py - ay) - ey * (px - ax)
        if c < 0 and c < -eps * math.hypot(ex, ey):
            return False
        ax, ay = bx, by
    return True


def point_in_polygon_even_odd(p, vertices) -> bool:
    """Crossing-number test for a simple polygon; boundary behaviour is unspecified."""
    px, py = p[0], p[1]
    inside = False
    n = len(vertices)
    for i in range(n):
        x1, y1 = vertices[i - 1]
        x2, y2 = vertices[i]
        if (y1 > py) != (y2 > py):
            xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < xc:
                inside = not inside
    return inside


def polygon_area(hull: ConvexHullPolygon) -> float:
    vs = hull.vertices
    return 0.5 * sum(cross((0.0, 0.0), vs[i - 1], vs[i]) for i in range(len(vs)))


def polygon_centroid(hull: ConvexHullPolygon) -> Point2:
    """Area-weighted centroid via the shoelace decomposition."""
    vs = hull.vertices
    ox, oy = vs[0]
    a2 = cx = cy = 0.0
    # fan triangles from the first vertex keep the arithmetic well-conditioned
    for i in range(1, len(vs) - 1):
        x1, y1 = vs[i][0] - ox, vs[i][1] - oy
        x2, y2 = vs[i + 1][0] - ox, vs[i + 1][1] - oy
        w = x1 * y2 - x2 * y1
        a2 += w
        cx += w * (x1 + x2)
        cy += w * (y1 + y2)
    return Point2(ox + cx / (3.0 * a2), oy + cy / (3.0 * a2))
