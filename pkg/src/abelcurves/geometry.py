"""Exact convex-polygon tests on rational points (separating axes)."""
from __future__ import annotations

from typing import Sequence

from .paths import Point


def _axes(poly: Sequence[Point]) -> list[Point]:
    out = []
    n = len(poly)
    for k in range(n):
        (x0, y0), (x1, y1) = poly[k], poly[(k + 1) % n]
        if (x0, y0) != (x1, y1):
            out.append((y0 - y1, x1 - x0))
    return out


def _project(poly: Sequence[Point], axis: Point):
    vals = [p[0] * axis[0] + p[1] * axis[1] for p in poly]
    return min(vals), max(vals)


def interiors_disjoint(p: Sequence[Point], q: Sequence[Point]) -> bool:
    """True if the convex hulls of ``p`` and ``q`` meet at most along their boundaries.

    A two-point sequence is a segment (empty interior); a segment and a polygon
    are "disjoint" unless the segment enters the polygon's interior.
    """
    for axis in _axes(p) + _axes(q):
        lo1, hi1 = _project(p, axis)
        lo2, hi2 = _project(q, axis)
        if hi1 <= lo2 or hi2 <= lo1:
            return True
    return False


def bbox(points: Sequence[Point]):
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return min(xs), min(ys), max(xs), max(ys)


def bboxes_overlap(a, b) -> bool:
    return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


def triangle_area2(a: Point, b: Point, c: Point):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
