"""Planar measure kernels: shoelace area, centroids, minimum distance.

All computations are in raw degrees / square degrees on the lon-lat plane.
Orientation tests use an absolute epsilon of 1e-12 (degree units), well below
the ~1e-7 resolution of real coordinate data.
"""

from __future__ import annotations

import math

from .errors import DegenerateGeometryError
from .geometry import Coordinate, Geometry, LineString, Point, Polygon

EPS = 1e-12
EPS_SQ = EPS * EPS

XY = tuple[float, float]
Seg = tuple[float, float, float, float]


def orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> int:
    """Sign of the cross product (b-a) x (c-a): +1 left turn, -1 right, 0 collinear."""
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if abs(v) <= EPS:
        return 0
    return 1 if v > 0.0 else -1


def point_seg_dist_sq(px, py, ax, ay, bx, by) -> float:
    """Squared distance from point p to segment ab."""
    dx = bx - ax
    dy = by - ay
    denom = dx * dx + dy * dy
    if denom <= 0.0:
        ex = px - ax
        ey = py - ay
        return ex * ex + ey * ey
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return ex * ex + ey * ey


def on_segment(px, py, ax, ay, bx, by) -> bool:
    """True when p lies on segment ab (within the 1e-12 distance epsilon)."""
    return point_seg_dist_sq(px, py, ax, ay, bx, by) <= EPS_SQ


def segments_cross(a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y) -> bool:
    """True when the two segments share at least one point."""
    o1 = orient(a1x, a1y, a2x, a2y, b1x, b1y)
    o2 = orient(a1x, a1y, a2x, a2y, b2x, b2y)
    o3 = orient(b1x, b1y, b2x, b2y, a1x, a1y)
    o4 = orient(b1x, b1y, b2x, b2y, a2x, a2y)
    if o1 != o2 and o3 != o4 and o1 * o2 <= 0 and o3 * o4 <= 0:
        return True
    if o1 == 0 and on_segment(b1x, b1y, a1x, a1y, a2x, a2y):
        return True
    if o2 == 0 and on_segment(b2x, b2y, a1x, a1y, a2x, a2y):
        return True
    if o3 == 0 and on_segment(a1x, a1y, b1x, b1y, b2x, b2y):
        return True
    if o4 == 0 and on_segment(a2x, a2y, b1x, b1y, b2x, b2y):
        return True
    return False


def seg_seg_dist_sq(a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y) -> float:
    """Squared minimum distance between two segments."""
    if segments_cross(a1x, a1y, a2x, a2y, b1x, b1y, b2x, b2y):
        return 0.0
    return min(
        point_seg_dist_sq(a1x, a1y, b1x, b1y, b2x, b2y),
        point_seg_dist_sq(a2x, a2y, b1x, b1y, b2x, b2y),
        point_seg_dist_sq(b1x, b1y, a1x, a1y, a2x, a2y),
        point_seg_dist_sq(b2x, b2y, a1x, a1y, a2x, a2y),
    )


def _ring_shoelace(ring: tuple[Coordinate, ...]) -> float:
    """Signed shoelace area of a closed ring.

    Computed relative to the first vertex to avoid catastrophic cancellation
    at coordinates far from the origin."""
    ox = ring[0].x
    oy = ring[0].y
    s = 0.0
    for i in range(len(ring) - 1):
        ax = ring[i].x - ox
        ay = ring[i].y - oy
        bx = ring[i + 1].x - ox
        by = ring[i + 1].y - oy
        s += ax * by - bx * ay
    return s / 2.0


def area(g: Geometry) -> float:
    """Area in square degrees; exactly 0 for Point and LineString."""
    if isinstance(g, (Point, LineString)):
        return 0.0
    ext = abs(_ring_shoelace(g.exterior))
    holes = sum(abs(_ring_shoelace(r)) for r in g.holes)
    if holes > ext:
        raise DegenerateGeometryError("hole area exceeds exterior area")
    return ext - holes


def _ring_centroid(ring: tuple[Coordinate, ...]) -> tuple[float, float, float]:
    """(signed area, cx, cy) of one ring via the cross-product formula,
    evaluated relative to the first vertex for numerical stability."""
    ox = ring[0].x
    oy = ring[0].y
    a = _ring_shoelace(ring)
    sx = sy = 0.0
    for i in range(len(ring) - 1):
        px = ring[i].x - ox
        py = ring[i].y - oy
        qx = ring[i + 1].x - ox
        qy = ring[i + 1].y - oy
        w = px * qy - qx * py
        sx += (px + qx) * w
        sy += (py + qy) * w
    if a == 0.0:
        return 0.0, 0.0, 0.0
    return a, ox + sx / (6.0 * a), oy + sy / (6.0 * a)


def centroid(g: Geometry) -> Coordinate:
    """Centroid: the point itself, the length-weighted mean of segment midpoints,
    or the area-weighted polygon centroid with holes subtracted."""
    if isinstance(g, Point):
        return g.point
    if isinstance(g, LineString):
        total = sx = sy = 0.0
        for i in range(len(g.path) - 1):
            a = g.path[i]
            b = g.path[i + 1]
            seg_len = math.hypot(b.x - a.x, b.y - a.y)
            total += seg_len
            sx += seg_len * (a.x + b.x) / 2.0
            sy += seg_len * (a.y + b.y) / 2.0
        if total == 0.0:
            raise DegenerateGeometryError("zero-length linestring has no centroid")
        return Coordinate(sx / total, sy / total)

    a_ext, cx_ext, cy_ext = _ring_centroid(g.exterior)
    w = abs(a_ext)
    if w == 0.0:
        raise DegenerateGeometryError("zero-area polygon has no centroid")
    sx = cx_ext * w
    sy = cy_ext * w
    for hole in g.holes:
        a_h, cx_h, cy_h = _ring_centroid(hole)
        sx -= cx_h * abs(a_h)
        sy -= cy_h * abs(a_h)
        w -= abs(a_h)
    if w <= 0.0:
        raise DegenerateGeometryError("zero-area polygon has no centroid")
    return Coordinate(sx / w, sy / w)


def segments_of(g: Geometry) -> list[Seg]:
    """All segments of a geometry (empty for points)."""
    segs: list[Seg] = []
    if isinstance(g, Point):
        return segs
    if isinstance(g, LineString):
        paths = (g.path,)
    else:
        paths = g.rings
    for path in paths:
        for i in range(len(path) - 1):
            a = path[i]
            b = path[i + 1]
            segs.append((a.x, a.y, b.x, b.y))
    return segs


def point_in_rings(px: float, py: float, poly: Polygon) -> str:
    """Locate a point against a polygon: 'interior', 'boundary' or 'exterior'.

    Even-odd ray casting over all rings; boundary incidences are resolved
    first with the on_segment test.
    """
    crossings = 0
    for ring in poly.rings:
        for i in range(len(ring) - 1):
            a = ring[i]
            b = ring[i + 1]
            if on_segment(px, py, a.x, a.y, b.x, b.y):
                return "boundary"
            if (a.y > py) != (b.y > py):
                xint = a.x + (py - a.y) * (b.x - a.x) / (b.y - a.y)
                if px < xint:
                    crossings += 1
    return "interior" if crossings % 2 == 1 else "exterior"


def bbox(g: Geometry) -> tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y) of a geometry."""
    if isinstance(g, Point):
        return g.point.x, g.point.y, g.point.x, g.point.y
    coords = g.path if isinstance(g, LineString) else [c for r in g.rings for c in r]
    xs = [c.x for c in coords]
    ys = [c.y for c in coords]
    return min(xs), min(ys), max(xs), max(ys)


def _points_of(g: Geometry) -> list[XY]:
    if isinstance(g, Point):
        return [(g.point.x, g.point.y)]
    if isinstance(g, LineString):
        return [(c.x, c.y) for c in g.path]
    return [(c.x, c.y) for r in g.rings for c in r]


def min_distance(gi: Geometry, gj: Geometry) -> float:
    """Minimum Euclidean distance between two geometries, 0 iff they intersect."""
    # Polygon containment short-circuits: a representative point of one
    # geometry strictly inside the other means distance 0.
    if isinstance(gi, Polygon):
        qx, qy = _points_of(gj)[0]
        if point_in_rings(qx, qy, gi) != "exterior":
            return 0.0
    if isinstance(gj, Polygon):
        qx, qy = _points_of(gi)[0]
        if point_in_rings(qx, qy, gj) != "exterior":
            return 0.0

    segs_i = segments_of(gi)
    segs_j = segments_of(gj)
    best = math.inf
    if not segs_i and not segs_j:
        (px, py), (qx, qy) = _points_of(gi)[0], _points_of(gj)[0]
        return math.hypot(px - qx, py - qy)
    if not segs_i:
        px, py = _points_of(gi)[0]
        for s in segs_j:
            d = point_seg_dist_sq(px, py, *s)
            if d < best:
                best = d
                if best == 0.0:
                    return 0.0
        return math.sqrt(best)
    if not segs_j:
        px, py = _points_of(gj)[0]
        for s in segs_i:
            d = point_seg_dist_sq(px, py, *s)
            if d < best:
                best = d
                if best == 0.0:
                    return 0.0
        return math.sqrt(best)
    for si in segs_i:
        for sj in segs_j:
            d = seg_seg_dist_sq(*si, *sj)
            if d < best:
                best = d
                if best == 0.0:
                    return 0.0
    return math.sqrt(best)
