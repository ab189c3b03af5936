"""DE-9IM intersection matrices and the eight OGC named predicates.

Topology rules: a Point's interior is the point and its boundary is empty;
an open LineString's boundary is its two endpoints (closed rings have an
empty boundary, mod-2 rule); a Polygon's boundary is its rings and its
interior is the enclosed region minus holes.

The engine splits each geometry's one-dimensional carriers (line paths,
polygon rings) at every intersection with the other geometry, classifies
piece midpoints, and assembles the matrix from those locations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateGeometryError
from .geometry import Geometry, LineString, Point, Polygon
from .measures import (
    EPS,
    EPS_SQ,
    Seg,
    min_distance,
    on_segment,
    orient,
    point_in_rings,
    segments_cross,
    segments_of,
)

PREDICATE_NAMES = (
    "equals",
    "disjoint",
    "intersects",
    "crosses",
    "touches",
    "contains",
    "within",
    "overlaps",
)

DISJOINT_BUT_NEAR = "disjoint_but_near"

_DIM = {"Point": 0, "LineString": 1, "Polygon": 2}


@dataclass(frozen=True)
class DE9IM:
    """3x3 intersection-dimension matrix, row-major over {F,0,1,2}.

    Rows are interior/boundary/exterior of the subject, columns the same
    for the object: cells = II IB IE BI BB BE EI EB EE.
    """

    cells: str

    def __post_init__(self):
        if len(self.cells) != 9 or any(c not in "F012" for c in self.cells):
            raise ValueError(f"bad DE-9IM cells {self.cells!r}")

    def transpose(self) -> "DE9IM":
        c = self.cells
        return DE9IM(c[0] + c[3] + c[6] + c[1] + c[4] + c[7] + c[2] + c[5] + c[8])

    def matches(self, mask: str) -> bool:
        """Evaluate an OGC mask pattern: T = any dim, F = empty, 012 exact, * any."""
        for cell, m in zip(self.cells, mask):
            if m == "*":
                continue
            if m == "T":
                if cell == "F":
                    return False
            elif cell != m:
                return False
        return True

    def __str__(self) -> str:
        return self.cells


# --- segment pair analysis ---------------------------------------------------


def _seg_param(ax, ay, bx, by, px, py) -> float:
    """Parameter of p along segment ab, via the dominant axis."""
    dx = bx - ax
    dy = by - ay
    if abs(dx) >= abs(dy):
        return (px - ax) / dx if dx != 0.0 else 0.0
    return (py - ay) / dy


def _seg_intersection(a: Seg, b: Seg):
    """Classify the intersection of two segments.

    Returns None, ("point", tA, tB, x, y) or ("overlap", tA0, tA1, tB0, tB1);
    overlap params are sorted ascending on each segment.
    """
    a1x, a1y, a2x, a2y = a
    b1x, b1y, b2x, b2y = b
    o1 = orient(a1x, a1y, a2x, a2y, b1x, b1y)
    o2 = orient(a1x, a1y, a2x, a2y, b2x, b2y)
    o3 = orient(b1x, b1y, b2x, b2y, a1x, a1y)
    o4 = orient(b1x, b1y, b2x, b2y, a2x, a2y)

    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        len_a = math.hypot(a2x - a1x, a2y - a1y)
        if len_a <= EPS:
            if on_segment(a1x, a1y, b1x, b1y, b2x, b2y):
                return ("point", 0.0, _seg_param(*b, a1x, a1y), a1x, a1y)
            return None
        tb1 = _seg_param(*a, b1x, b1y)
        tb2 = _seg_param(*a, b2x, b2y)
        lo, hi = min(tb1, tb2), max(tb1, tb2)
        lo_c = max(0.0, lo)
        hi_c = min(1.0, hi)
        if (hi_c - lo_c) * len_a < -EPS:
            return None
        if (hi_c - lo_c) * len_a <= EPS:
            t = min(1.0, max(0.0, (lo_c + hi_c) / 2.0))
            px = a1x + t * (a2x - a1x)
            py = a1y + t * (a2y - a1y)
            if not on_segment(px, py, b1x, b1y, b2x, b2y):
                return None
            return ("point", t, _seg_param(*b, px, py), px, py)
        pax = a1x + lo_c * (a2x - a1x)
        pay = a1y + lo_c * (a2y - a1y)
        pbx = a1x + hi_c * (a2x - a1x)
        pby = a1y + hi_c * (a2y - a1y)
        u0 = _seg_param(*b, pax, pay)
        u1 = _seg_param(*b, pbx, pby)
        return ("overlap", lo_c, hi_c, min(u0, u1), max(u0, u1))

    # Endpoint-on-segment touches (covers shared vertices).
    if o1 == 0 and on_segment(b1x, b1y, a1x, a1y, a2x, a2y):
        return ("point", _seg_param(*a, b1x, b1y), 0.0, b1x, b1y)
    if o2 == 0 and on_segment(b2x, b2y, a1x, a1y, a2x, a2y):
        return ("point", _seg_param(*a, b2x, b2y), 1.0, b2x, b2y)
    if o3 == 0 and on_segment(a1x, a1y, b1x, b1y, b2x, b2y):
        return ("point", 0.0, _seg_param(*b, a1x, a1y), a1x, a1y)
    if o4 == 0 and on_segment(a2x, a2y, b1x, b1y, b2x, b2y):
        return ("point", 1.0, _seg_param(*b, a2x, a2y), a2x, a2y)

    if o1 != o2 and o3 != o4:
        dax = a2x - a1x
        day = a2y - a1y
        dbx = b2x - b1x
        dby = b2y - b1y
        denom = dax * dby - day * dbx
        if denom == 0.0:
            return None
        ta = ((b1x - a1x) * dby - (b1y - a1y) * dbx) / denom
        tb = ((b1x - a1x) * day - (b1y - a1y) * dax) / denom
        if -1e-9 <= ta <= 1.0 + 1e-9 and -1e-9 <= tb <= 1.0 + 1e-9:
            ta = min(1.0, max(0.0, ta))
            tb = min(1.0, max(0.0, tb))
            return ("point", ta, tb, a1x + ta * dax, a1y + ta * day)
    return None


def _seg_bbox(s: Seg):
    x1, y1, x2, y2 = s
    return (min(x1, x2), min(y1, y2), max(x1, x2), max(y1, y2))


class _PairAnalysis:
    """All intersections between two segment lists, as cut parameters per
    segment, isolated intersection points, and collinear overlap intervals."""

    def __init__(self, segs_a: list[Seg], segs_b: list[Seg]):
        self.segs_a = segs_a
        self.segs_b = segs_b
        self.cuts_a: list[list[float]] = [[] for _ in segs_a]
        self.cuts_b: list[list[float]] = [[] for _ in segs_b]
        self.overlaps_a: list[list[tuple[float, float]]] = [[] for _ in segs_a]
        self.overlaps_b: list[list[tuple[float, float]]] = [[] for _ in segs_b]
        self.points: list[tuple[float, float]] = []
        self.has_overlap = False

        boxes_b = [_seg_bbox(s) for s in segs_b]
        for i, sa in enumerate(segs_a):
            ax0, ay0, ax1, ay1 = _seg_bbox(sa)
            for j, sb in enumerate(segs_b):
                bx0, by0, bx1, by1 = boxes_b[j]
                if ax0 > bx1 + EPS or bx0 > ax1 + EPS or ay0 > by1 + EPS or by0 > ay1 + EPS:
                    continue
                res = _seg_intersection(sa, sb)
                if res is None:
                    continue
                if res[0] == "point":
                    _, ta, tb, px, py = res
                    self.cuts_a[i].append(ta)
                    self.cuts_b[j].append(tb)
                    self.points.append((px, py))
                else:
                    _, ta0, ta1, tb0, tb1 = res
                    self.cuts_a[i].extend((ta0, ta1))
                    self.cuts_b[j].extend((tb0, tb1))
                    self.overlaps_a[i].append((ta0, ta1))
                    self.overlaps_b[j].append((tb0, tb1))
                    self.has_overlap = True


def _piece_mids(segs: list[Seg], cuts: list[list[float]]):
    """Midpoints of the sub-segments obtained by cutting each segment at its
    intersection parameters; zero-length pieces are dropped."""
    mids = []
    for seg, ts in zip(segs, cuts):
        x1, y1, x2, y2 = seg
        seg_len = math.hypot(x2 - x1, y2 - y1)
        if seg_len <= EPS:
            continue
        params = sorted({0.0, 1.0, *ts})
        for t0, t1 in zip(params, params[1:]):
            if (t1 - t0) * seg_len <= EPS:
                continue
            tm = (t0 + t1) / 2.0
            mids.append((x1 + tm * (x2 - x1), y1 + tm * (y2 - y1)))
    return mids


def _covered(segs: list[Seg], overlaps: list[list[tuple[float, float]]]) -> bool:
    """True when every segment is fully covered by its overlap intervals."""
    for seg, ivals in zip(segs, overlaps):
        x1, y1, x2, y2 = seg
        seg_len = math.hypot(x2 - x1, y2 - y1)
        if seg_len <= EPS:
            continue
        eps_t = EPS / seg_len
        cur = 0.0
        for t0, t1 in sorted(ivals):
            if t0 > cur + eps_t:
                return False
            cur = max(cur, t1)
        if cur < 1.0 - eps_t:
            return False
    return True


# --- polygon helpers ---------------------------------------------------------


def _validate_polygon(poly: Polygon) -> None:
    """Reject self-intersecting or degenerate rings."""
    for ring in poly.rings:
        n = len(ring) - 1
        segs = []
        for i in range(n):
            a = ring[i]
            b = ring[i + 1]
            if math.hypot(b.x - a.x, b.y - a.y) <= EPS:
                raise DegenerateGeometryError("zero-length ring segment")
            segs.append((a.x, a.y, b.x, b.y))
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    # Adjacent segments share one vertex; a collinear
                    # fold-back (spike) is the illegal configuration.
                    if j == i + 1:
                        p, q, r = ring[i], ring[i + 1], ring[j + 1]
                    else:
                        p, q, r = ring[n - 1], ring[0], ring[1]
                    if (
                        orient(p.x, p.y, q.x, q.y, r.x, r.y) == 0
                        and (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y) < 0
                    ):
                        raise DegenerateGeometryError("ring folds back on itself")
                elif segments_cross(*segs[i], *segs[j]):
                    raise DegenerateGeometryError("self-intersecting ring")


def interior_point(poly: Polygon) -> tuple[float, float]:
    """A point strictly inside the polygon, via a scanline between vertex rows."""
    ys = sorted({c.y for ring in poly.rings for c in ring})
    if len(ys) < 2:
        raise DegenerateGeometryError("flat polygon")
    best_gap = 0.0
    y_star = ys[0]
    for y0, y1 in zip(ys, ys[1:]):
        if y1 - y0 > best_gap:
            best_gap = y1 - y0
            y_star = (y0 + y1) / 2.0
    if best_gap <= 0.0:
        raise DegenerateGeometryError("flat polygon")
    xs = []
    for ring in poly.rings:
        for i in range(len(ring) - 1):
            a = ring[i]
            b = ring[i + 1]
            if (a.y > y_star) != (b.y > y_star):
                xs.append(a.x + (y_star - a.y) * (b.x - a.x) / (b.y - a.y))
    xs.sort()
    if len(xs) < 2:
        raise DegenerateGeometryError("scanline found no interior interval")
    best_w = -1.0
    best_x = xs[0]
    for k in range(0, len(xs) - 1, 2):
        w = xs[k + 1] - xs[k]
        if w > best_w:
            best_w = w
            best_x = (xs[k] + xs[k + 1]) / 2.0
    return best_x, y_star


# --- per-kind matrices -------------------------------------------------------


def _line_endpoints(line: LineString):
    if line.is_closed:
        return []
    first = line.path[0]
    last = line.path[-1]
    return [(first.x, first.y), (last.x, last.y)]


def _locate_on_line(line: LineString, px: float, py: float) -> str:
    hit = False
    for seg in segments_of(line):
        if on_segment(px, py, *seg):
            hit = True
            break
    if not hit:
        return "exterior"
    for ex, ey in _line_endpoints(line):
        if (px - ex) ** 2 + (py - ey) ** 2 <= EPS_SQ:
            return "boundary"
    return "interior"


def _on_any_segment(px: float, py: float, segs: list[Seg]) -> bool:
    return any(on_segment(px, py, *s) for s in segs)


def _relate_point_point(a: Point, b: Point) -> DE9IM:
    dx = a.point.x - b.point.x
    dy = a.point.y - b.point.y
    same = dx * dx + dy * dy <= EPS_SQ
    return DE9IM("0FFFFFFF2") if same else DE9IM("FF0FFF0F2")


def _relate_point_line(p: Point, line: LineString) -> DE9IM:
    loc = _locate_on_line(line, p.point.x, p.point.y)
    ii = "0" if loc == "interior" else "F"
    ib = "0" if loc == "boundary" else "F"
    ie = "0" if loc == "exterior" else "F"
    eb = "F" if line.is_closed else "0"
    return DE9IM(f"{ii}{ib}{ie}FFF1{eb}2")


def _relate_point_polygon(p: Point, poly: Polygon) -> DE9IM:
    loc = point_in_rings(p.point.x, p.point.y, poly)
    ii = "0" if loc == "interior" else "F"
    ib = "0" if loc == "boundary" else "F"
    ie = "0" if loc == "exterior" else "F"
    return DE9IM(f"{ii}{ib}{ie}FFF212")


def _relate_line_line(a: LineString, b: LineString) -> DE9IM:
    segs_a = segments_of(a)
    segs_b = segments_of(b)
    ana = _PairAnalysis(segs_a, segs_b)
    ends_a = _line_endpoints(a)
    ends_b = _line_endpoints(b)

    mids_a = _piece_mids(segs_a, ana.cuts_a)
    a_runs_on_b = any(_on_any_segment(mx, my, segs_b) for mx, my in mids_a)

    if a_runs_on_b:
        ii = "1"
    else:
        ii = "F"
        for px, py in ana.points:
            if (
                _locate_on_line(a, px, py) == "interior"
                and _locate_on_line(b, px, py) == "interior"
            ):
                ii = "0"
                break

    ib = "F"
    for ex, ey in ends_b:
        if _locate_on_line(a, ex, ey) == "interior":
            ib = "0"
            break
    bi = "F"
    for ex, ey in ends_a:
        if _locate_on_line(b, ex, ey) == "interior":
            bi = "0"
            break
    bb = "F"
    for ax, ay in ends_a:
        for bx, by in ends_b:
            if (ax - bx) ** 2 + (ay - by) ** 2 <= EPS_SQ:
                bb = "0"
    be = "F"
    for ex, ey in ends_a:
        if not _on_any_segment(ex, ey, segs_b):
            be = "0"
            break
    eb = "F"
    for ex, ey in ends_b:
        if not _on_any_segment(ex, ey, segs_a):
            eb = "0"
            break

    ie = "F" if _covered(segs_a, ana.overlaps_a) else "1"
    ei = "F" if _covered(segs_b, ana.overlaps_b) else "1"
    return DE9IM(f"{ii}{ib}{ie}{bi}{bb}{be}{ei}{eb}2")


def _relate_line_polygon(line: LineString, poly: Polygon) -> DE9IM:
    segs_l = segments_of(line)
    segs_r = segments_of(poly)
    ana = _PairAnalysis(segs_l, segs_r)

    locs = {point_in_rings(mx, my, poly) for mx, my in _piece_mids(segs_l, ana.cuts_a)}
    ii = "1" if "interior" in locs else "F"
    ie = "1" if "exterior" in locs else "F"

    if "boundary" in locs:
        ib = "1"
    else:
        ib = "F"
        for px, py in ana.points:
            if _locate_on_line(line, px, py) == "interior":
                ib = "0"
                break

    bi = bb = be = "F"
    for ex, ey in _line_endpoints(line):
        loc = point_in_rings(ex, ey, poly)
        if loc == "interior":
            bi = "0"
        elif loc == "boundary":
            bb = "0"
        else:
            be = "0"

    eb = "F" if _covered(segs_r, ana.overlaps_b) else "1"
    return DE9IM(f"{ii}{ib}{ie}{bi}{bb}{be}2{eb}2")


def _relate_polygon_polygon(a: Polygon, b: Polygon) -> DE9IM:
    segs_a = segments_of(a)
    segs_b = segments_of(b)
    ana = _PairAnalysis(segs_a, segs_b)

    locs_a = {point_in_rings(mx, my, b) for mx, my in _piece_mids(segs_a, ana.cuts_a)}
    locs_b = {point_in_rings(mx, my, a) for mx, my in _piece_mids(segs_b, ana.cuts_b)}
    a_in = "interior" in locs_a
    a_out = "exterior" in locs_a
    b_in = "interior" in locs_b
    b_out = "exterior" in locs_b

    ipt_a = interior_point(a)
    ipt_b = interior_point(b)
    a_pt_loc = point_in_rings(*ipt_a, b)
    b_pt_loc = point_in_rings(*ipt_b, a)

    ii = "2" if (a_in or b_in or a_pt_loc == "interior" or b_pt_loc == "interior") else "F"
    ib = "1" if b_in else "F"
    ie = "2" if (a_out or b_in or a_pt_loc == "exterior") else "F"
    bi = "1" if a_in else "F"
    if ana.has_overlap:
        bb = "1"
    elif ana.points:
        bb = "0"
    else:
        bb = "F"
    be = "1" if a_out else "F"
    ei = "2" if (b_out or a_in or b_pt_loc == "exterior") else "F"
    eb = "1" if b_out else "F"
    return DE9IM(f"{ii}{ib}{ie}{bi}{bb}{be}{ei}{eb}2")


def de9im(gi: Geometry, gj: Geometry) -> DE9IM:
    """Full DE-9IM matrix for a pair of geometries."""
    for g in (gi, gj):
        if isinstance(g, Polygon):
            _validate_polygon(g)

    if isinstance(gi, Point):
        if isinstance(gj, Point):
            return _relate_point_point(gi, gj)
        if isinstance(gj, LineString):
            return _relate_point_line(gi, gj)
        return _relate_point_polygon(gi, gj)
    if isinstance(gi, LineString):
        if isinstance(gj, Point):
            return _relate_point_line(gj, gi).transpose()
        if isinstance(gj, LineString):
            return _relate_line_line(gi, gj)
        return _relate_line_polygon(gi, gj)
    if isinstance(gj, Point):
        return _relate_point_polygon(gj, gi).transpose()
    if isinstance(gj, LineString):
        return _relate_line_polygon(gj, gi).transpose()
    return _relate_polygon_polygon(gi, gj)


# --- named predicates --------------------------------------------------------


def named_predicates(m: DE9IM, kind_i: str, kind_j: str) -> set[str]:
    """The OGC predicates satisfied by matrix m for the given geometry kinds.

    crosses applies to mismatched dimensions (either order) and line/line;
    overlaps to equal dimensions, with the line/line variant requiring a
    one-dimensional interior intersection.
    """
    da = _DIM[kind_i]
    db = _DIM[kind_j]
    preds: set[str] = set()

    disjoint = m.matches("FF*FF****")
    if disjoint:
        preds.add("disjoint")
    else:
        preds.add("intersects")

    if m.matches("T*F**FFF*"):
        preds.add("equals")
    if m.matches("FT*******") or m.matches("F**T*****") or m.matches("F***T****"):
        preds.add("touches")
    if da < db:
        if m.matches("T*T******"):
            preds.add("crosses")
    elif da > db:
        if m.matches("T*****T**"):
            preds.add("crosses")
    elif da == 1:
        if m.matches("0********"):
            preds.add("crosses")
    if m.matches("T*F**F***"):
        preds.add("within")
    if m.matches("T*****FF*"):
        preds.add("contains")
    if da == db:
        if da == 1:
            if m.matches("1*T***T**"):
                preds.add("overlaps")
        elif m.matches("T*T***T**"):
            preds.add("overlaps")
    return preds


_CLASSIFY_PRIORITY = (
    "equals",
    "within",
    "contains",
    "crosses",
    "overlaps",
    "touches",
    "disjoint",
)


def classify_relation(gi: Geometry, gj: Geometry) -> str:
    """Collapse the named predicates of a pair to a single most-specific label.

    Pairs that intersect but match none of the named masks fall back to
    'intersects'.
    """
    m = de9im(gi, gj)
    preds = named_predicates(m, gi.kind, gj.kind)
    for name in _CLASSIFY_PRIORITY:
        if name in preds:
            return name
    return "intersects"


def is_disjoint_but_near(gi: Geometry, gj: Geometry, radius: float = 0.003) -> bool:
    """True when the pair is disjoint yet within the given buffer radius."""
    if classify_relation(gi, gj) != "disjoint":
        return False
    return min_distance(gi, gj) <= radius
