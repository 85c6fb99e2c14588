"""Exact planar predicates for polygon containment and contiguity tests.

Coordinates are IEEE doubles. Orientation signs are evaluated with a fast
floating-point filter and fall back to exact rational arithmetic when the
result is too close to zero to trust, so every predicate here is
deterministic and independent of evaluation order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple[float, float]
Ring = Sequence[Point]
# A polygon is one exterior ring followed by zero or more hole rings.
Polygon = Sequence[Ring]

# Relative error of the float orientation determinant stays below a few ulps;
# anything larger than this bound has a trustworthy sign.
_FILTER = 1e-14

OUTSIDE = 0
INSIDE = 1
BOUNDARY = 2


def orientation(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> int:
    """Sign of the cross product (b-a) x (c-a): +1 left turn, -1 right, 0 collinear."""
    t1 = (bx - ax) * (cy - ay)
    t2 = (by - ay) * (cx - ax)
    det = t1 - t2
    bound = _FILTER * (abs(t1) + abs(t2))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    if bound == 0.0:
        return 0
    # Too close to call in floats: redo exactly.
    d = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    if d > 0:
        return 1
    if d < 0:
        return -1
    return 0


def on_segment(px: float, py: float, a: Point, b: Point) -> bool:
    """True when (px, py) lies on the closed segment a-b."""
    if orientation(a[0], a[1], b[0], b[1], px, py) != 0:
        return False
    return min(a[0], b[0]) <= px <= max(a[0], b[0]) and min(a[1], b[1]) <= py <= max(a[1], b[1])


def point_in_rings(px: float, py: float, rings: Polygon) -> int:
    """Locate a point against a ring set under the even-odd rule.

    Returns BOUNDARY if the point lies on any ring edge, INSIDE if an odd
    number of ray crossings is counted over all rings (holes flip parity),
    OUTSIDE otherwise. Rings need not be explicitly closed.
    """
    crossings = 0
    for ring in rings:
        n = len(ring)
        for k in range(n):
            a = ring[k]
            b = ring[(k + 1) % n]
            if a == b:
                continue
            if on_segment(px, py, a, b):
                return BOUNDARY
            # Half-open straddle test avoids double counting at vertices.
            if (a[1] > py) != (b[1] > py):
                o = orientation(a[0], a[1], b[0], b[1], px, py)
                if b[1] > a[1]:
                    if o > 0:
                        crossings += 1
                else:
                    if o < 0:
                        crossings += 1
    return INSIDE if crossings % 2 == 1 else OUTSIDE


def _bbox_overlap(a: Point, b: Point, c: Point, d: Point) -> bool:
    return (
        min(a[0], b[0]) <= max(c[0], d[0])
        and min(c[0], d[0]) <= max(a[0], b[0])
        and min(a[1], b[1]) <= max(c[1], d[1])
        and min(c[1], d[1]) <= max(a[1], b[1])
    )


def segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when closed segments a-b and c-d share at least one point."""
    if not _bbox_overlap(a, b, c, d):
        return False
    o1 = orientation(a[0], a[1], b[0], b[1], c[0], c[1])
    o2 = orientation(a[0], a[1], b[0], b[1], d[0], d[1])
    o3 = orientation(c[0], c[1], d[0], d[1], a[0], a[1])
    o4 = orientation(c[0], c[1], d[0], d[1], b[0], b[1])
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and on_segment(c[0], c[1], a, b):
        return True
    if o2 == 0 and on_segment(d[0], d[1], a, b):
        return True
    if o3 == 0 and on_segment(a[0], a[1], c, d):
        return True
    if o4 == 0 and on_segment(b[0], b[1], c, d):
        return True
    return False


def segments_overlap(a: Point, b: Point, c: Point, d: Point) -> bool:
    """True when a-b and c-d are collinear and share a segment of positive length."""
    if orientation(a[0], a[1], b[0], b[1], c[0], c[1]) != 0:
        return False
    if orientation(a[0], a[1], b[0], b[1], d[0], d[1]) != 0:
        return False
    # Project on the dominant axis and require the 1-D overlap to be open.
    if abs(b[0] - a[0]) >= abs(b[1] - a[1]):
        lo = max(min(a[0], b[0]), min(c[0], d[0]))
        hi = min(max(a[0], b[0]), max(c[0], d[0]))
    else:
        lo = max(min(a[1], b[1]), min(c[1], d[1]))
        hi = min(max(a[1], b[1]), max(c[1], d[1]))
    return lo < hi


def ring_bbox(rings: Polygon) -> tuple[float, float, float, float]:
    xs = [p[0] for ring in rings for p in ring]
    ys = [p[1] for ring in rings for p in ring]
    return min(xs), min(ys), max(xs), max(ys)
