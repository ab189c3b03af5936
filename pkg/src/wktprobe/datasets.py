"""Dataset construction: synthetic geometry sampling, attribute tables,
relation triplets with per-category quotas, location-prediction queries,
and train/validation/test splits.

The synthetic generator stands in for unreleased city extracts. Incidence
structures (shared edges, on-boundary points, duplicated geometries) are
built from bitwise-copied coordinates so that exact and epsilon-based
geometry engines agree on their classification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DegenerateGeometryError
from .geometry import Coordinate, Geometry, GeometryRecord, LineString, Point, Polygon
from .gridindex import BBox, bbox_of, build_index, query_bbox
from .measures import area, centroid, min_distance
from .relate import DISJOINT_BUT_NEAR, classify_relation

# Madison, WI style study area.
DEFAULT_BBOX = BBox(-89.55, 42.99, -89.25, 43.17)

MIN_EXTENT = 0.0005
MAX_EXTENT = 0.005
WALK_STEP = 0.0005

TRIPLET_PREDICATES = (
    "crosses",
    "disjoint",
    "touches",
    "overlaps",
    "within",
    "equals",
    "contains",
)

QUERY_PREDICATES = (
    "crosses",
    DISJOINT_BUT_NEAR,
    "touches",
    "overlaps",
    "within",
    "equals",
    "contains",
)

GEOM_KINDS = ("Point", "LineString", "Polygon")


@dataclass(frozen=True)
class BuilderConfig:
    bbox: BBox = DEFAULT_BBOX
    samples_per_type: int = 4000
    triplet_quota: int = 400
    location_objects: int = 200
    min_subjects: int = 5
    near_radius: float = 0.003
    split_ratios: tuple[float, float, float] = (0.80, 0.05, 0.15)
    seed: int = 0

    def __post_init__(self):
        if self.samples_per_type < 0:
            raise ConfigError("samples_per_type must be >= 0")
        for name in ("triplet_quota", "location_objects", "min_subjects"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if self.near_radius <= 0:
            raise ConfigError("near_radius must be > 0")
        if abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ConfigError("split ratios must sum to 1")
        if any(r < 0 for r in self.split_ratios):
            raise ConfigError("split ratios must be non-negative")

    def to_dict(self) -> dict:
        return {
            "bbox": [self.bbox.min_x, self.bbox.min_y, self.bbox.max_x, self.bbox.max_y],
            "samples_per_type": self.samples_per_type,
            "triplet_quota": self.triplet_quota,
            "location_objects": self.location_objects,
            "min_subjects": self.min_subjects,
            "near_radius": self.near_radius,
            "split_ratios": list(self.split_ratios),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BuilderConfig":
        kwargs = dict(d)
        if "bbox" in kwargs:
            kwargs["bbox"] = BBox(*kwargs["bbox"])
        if "split_ratios" in kwargs:
            kwargs["split_ratios"] = tuple(kwargs["split_ratios"])
        return cls(**kwargs)


@dataclass(frozen=True)
class GeometryAttributeRecord:
    id: str
    geom_type: str
    area: float
    centroid: Coordinate


@dataclass(frozen=True)
class RelationTriplet:
    subject_id: str
    predicate: str
    object_id: str
    distance: float


@dataclass(frozen=True)
class LocationQuery:
    object_id: str
    predicate: str
    answers: tuple[str, ...]


@dataclass
class TaskExample:
    ids: tuple[str, ...]
    target: object
    split: str = ""


@dataclass
class TaskDataset:
    task_id: str
    examples: list[TaskExample] = field(default_factory=list)


@dataclass
class TripletBuild:
    triplets: list[RelationTriplet]
    category_counts: dict[str, int]
    shortfalls: dict[str, int]
    dropped_fallback: int = 0


@dataclass
class QueryBuild:
    queries: list[LocationQuery]
    category_counts: dict[str, int]
    shortfalls: dict[str, int]


def _category(stype: str, pred: str, otype: str) -> str:
    return f"{stype}|{pred}|{otype}"


# --- synthetic generator -----------------------------------------------------


class _Gen:
    """Accumulates records with sequential per-type ids."""

    def __init__(self):
        self.records: list[GeometryRecord] = []
        self.counts = {"Point": 0, "LineString": 0, "Polygon": 0}

    def add(self, g: Geometry) -> str:
        prefix = {"Point": "P", "LineString": "L", "Polygon": "A"}[g.kind]
        rid = f"{prefix}{self.counts[g.kind]:06d}"
        self.counts[g.kind] += 1
        self.records.append(GeometryRecord(rid, g, "synthetic"))
        return rid

    def dup(self, rec_or_geom) -> str:
        g = rec_or_geom.geometry if isinstance(rec_or_geom, GeometryRecord) else rec_or_geom
        return self.add(g)


def _rect(x0: float, y0: float, w: float, h: float) -> Polygon:
    x1 = x0 + w
    y1 = y0 + h
    ring = (
        Coordinate(x0, y0),
        Coordinate(x0, y1),
        Coordinate(x1, y1),
        Coordinate(x1, y0),
        Coordinate(x0, y0),
    )
    return Polygon(ring)


def _rect_bounds(p: Polygon) -> tuple[float, float, float, float]:
    xs = [c.x for c in p.exterior]
    ys = [c.y for c in p.exterior]
    return min(xs), min(ys), max(xs), max(ys)


def _convex_hull(points: list[tuple[float, float]]):
    pts = sorted(set(points))
    if len(pts) < 3:
        return None

    def build(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and (
                (out[-1][0] - out[-2][0]) * (p[1] - out[-2][1])
                - (out[-1][1] - out[-2][1]) * (p[0] - out[-2][0])
            ) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        return None
    ring = tuple(Coordinate(x, y) for x, y in hull) + (Coordinate(*hull[0]),)
    return Polygon(ring)


class _Placer:
    def __init__(self, rng: np.random.Generator, box: BBox, margin: float):
        if box.width <= 2 * margin or box.height <= 2 * margin:
            raise ConfigError(
                f"bbox {box} too small for generator margin {margin} "
                "(cannot place requested counts)"
            )
        self.rng = rng
        self.box = box
        self.margin = margin

    def origin(self) -> tuple[float, float]:
        x = float(self.rng.uniform(self.box.min_x + self.margin, self.box.max_x - self.margin))
        y = float(self.rng.uniform(self.box.min_y + self.margin, self.box.max_y - self.margin))
        return x, y


def _rand_rect(pl: _Placer) -> Polygon:
    w = float(pl.rng.uniform(MIN_EXTENT, MAX_EXTENT))
    h = float(pl.rng.uniform(MIN_EXTENT, MAX_EXTENT))
    x0, y0 = pl.origin()
    return _rect(x0, y0, w, h)


def _rand_hull(pl: _Placer) -> Polygon:
    ext = float(pl.rng.uniform(MIN_EXTENT, MAX_EXTENT))
    cx, cy = pl.origin()
    while True:
        k = int(pl.rng.integers(4, 11))
        pts = [
            (float(pl.rng.uniform(cx, cx + ext)), float(pl.rng.uniform(cy, cy + ext)))
            for _ in range(k)
        ]
        hull = _convex_hull(pts)
        if hull is not None:
            return hull


def _rand_walk(pl: _Placer, n_min: int = 2, n_max: int = 20) -> LineString:
    n = int(pl.rng.integers(n_min, n_max + 1))
    x, y = pl.origin()
    pts = [Coordinate(x, y)]
    angle = float(pl.rng.uniform(0.0, 2.0 * math.pi))
    lo_x, hi_x = pl.box.min_x + 1e-4, pl.box.max_x - 1e-4
    lo_y, hi_y = pl.box.min_y + 1e-4, pl.box.max_y - 1e-4
    for _ in range(n - 1):
        angle += float(pl.rng.normal(0.0, 0.9))
        step = WALK_STEP * float(pl.rng.uniform(0.5, 1.5))
        nx = x + step * math.cos(angle)
        ny = y + step * math.sin(angle)
        if not (lo_x <= nx <= hi_x):
            nx = x - step * math.cos(angle)
        if not (lo_y <= ny <= hi_y):
            ny = y - step * math.sin(angle)
        x, y = nx, ny
        pts.append(Coordinate(x, y))
    return LineString(tuple(pts))


def generate_synthetic(cfg: BuilderConfig) -> list[GeometryRecord]:
    """Deterministic synthetic mix: uniform points, random-walk linestrings,
    rectangles and convex hulls, plus correlated clusters (points inside
    polygons, lines crossing polygons, shared edges, near pairs, duplicates)
    so every predicate category is populated."""
    spt = cfg.samples_per_type
    if spt == 0:
        return []
    rng = np.random.default_rng([cfg.seed, 0])
    pl = _Placer(rng, cfg.bbox, margin=0.02)
    gen = _Gen()

    h = spt // 100
    q_poly = min(spt // 10, max(0, (spt - 17 * h) // 6))
    q_line = min(spt // 10, max(0, (spt - 6 * h) // 7))
    q_pt = min(spt // 10, max(0, (spt - 19 * h) // 4))
    ql_pairs = q_line // 2

    # --- polygons ---
    anchors: list[Polygon] = []
    for _ in range(q_poly):
        anchors.append(_rand_rect(pl))
        gen.add(anchors[-1])
    for a in anchors:  # nested, strictly inside
        x0, y0, x1, y1 = _rect_bounds(a)
        w, hgt = x1 - x0, y1 - y0
        u = float(rng.uniform(0.15, 0.3))
        v = float(rng.uniform(0.15, 0.3))
        gen.add(_rect(x0 + u * w, y0 + v * hgt, w * 0.4, hgt * 0.4))
    for a in anchors:  # overlapping, extending beyond
        x0, y0, x1, y1 = _rect_bounds(a)
        w, hgt = x1 - x0, y1 - y0
        gen.add(_rect(x0 + 0.5 * w, y0 + 0.5 * hgt, w, hgt))
    for a in anchors:  # sharing the full right edge (exact coordinates)
        x0, y0, x1, y1 = _rect_bounds(a)
        w2 = float(rng.uniform(MIN_EXTENT, MAX_EXTENT))
        ring = (
            Coordinate(x1, y0),
            Coordinate(x1, y1),
            Coordinate(x1 + w2, y1),
            Coordinate(x1 + w2, y0),
            Coordinate(x1, y0),
        )
        gen.add(Polygon(ring))
    for a in anchors:  # disjoint but near
        x0, y0, x1, y1 = _rect_bounds(a)
        gap = float(rng.uniform(5e-5, 2.5e-3))
        gen.add(_rect(x1 + gap, y0, x1 - x0, y1 - y0))
    for a in anchors[:q_poly]:  # exact duplicates under new ids
        gen.add(a)

    hub_within: list[Polygon] = []
    hub_touch: list[Polygon] = []
    hub_near: list[Polygon] = []
    hub_cross: list[Polygon] = []
    for bucket in (hub_within, hub_touch, hub_near, hub_cross):
        for _ in range(h):
            p = _rand_rect(pl)
            bucket.append(p)
            gen.add(p)
    stacks: list[list[Polygon]] = []
    for _ in range(h):  # six concentric rectangles
        cx, cy = pl.origin()
        ext = MAX_EXTENT
        stack = []
        for level in range(6):
            e = ext * (0.78 ** level)
            p = _rect(cx - e / 2.0, cy - e / 2.0, e, e)
            stack.append(p)
            gen.add(p)
        stacks.append(stack)
    hub_overlap: list[Polygon] = []
    for _ in range(h):  # one center rect with six overlapping shifts
        c = _rand_rect(pl)
        hub_overlap.append(c)
        gen.add(c)
        x0, y0, x1, y1 = _rect_bounds(c)
        w, hgt = x1 - x0, y1 - y0
        for k in range(6):
            ang = 2.0 * math.pi * k / 6.0
            u = float(rng.uniform(0.4, 0.8))
            gen.add(_rect(x0 + u * w * math.cos(ang), y0 + u * hgt * math.sin(ang), w, hgt))

    used = gen.counts["Polygon"]
    for i in range(max(0, spt - used)):
        gen.add(_rand_hull(pl) if i % 2 == 0 else _rand_rect(pl))

    # --- linestrings ---
    def crossing_line(p: Polygon, horizontal: bool) -> LineString:
        x0, y0, x1, y1 = _rect_bounds(p)
        if horizontal:
            ym = float(rng.uniform(y0 + 0.1 * (y1 - y0), y1 - 0.1 * (y1 - y0)))
            ea = float(rng.uniform(1e-4, 5e-4))
            eb = float(rng.uniform(1e-4, 5e-4))
            return LineString((Coordinate(x0 - ea, ym), Coordinate(x1 + eb, ym)))
        xm = float(rng.uniform(x0 + 0.1 * (x1 - x0), x1 - 0.1 * (x1 - x0)))
        ea = float(rng.uniform(1e-4, 5e-4))
        eb = float(rng.uniform(1e-4, 5e-4))
        return LineString((Coordinate(xm, y0 - ea), Coordinate(xm, y1 + eb)))

    for i in range(q_line):
        if anchors:
            gen.add(crossing_line(anchors[i % len(anchors)], i % 2 == 0))
    for i in range(q_line):
        if anchors:
            x0, y0, x1, y1 = _rect_bounds(anchors[i % len(anchors)])
            w, hgt = x1 - x0, y1 - y0
            ym = y0 + 0.5 * hgt
            gen.add(LineString((Coordinate(x0 + 0.2 * w, ym), Coordinate(x1 - 0.2 * w, ym))))

    for _ in range(ql_pairs):  # transversal crossing pairs
        cx, cy = pl.origin()
        a1 = float(rng.uniform(0.0, 2.0 * math.pi))
        a2 = a1 + float(rng.uniform(0.6, math.pi - 0.6))
        r = WALK_STEP * 2.0
        gen.add(
            LineString(
                (
                    Coordinate(cx - r * math.cos(a1), cy - r * math.sin(a1)),
                    Coordinate(cx + r * math.cos(a1), cy + r * math.sin(a1)),
                )
            )
        )
        gen.add(
            LineString(
                (
                    Coordinate(cx - r * math.cos(a2), cy - r * math.sin(a2)),
                    Coordinate(cx + r * math.cos(a2), cy + r * math.sin(a2)),
                )
            )
        )
    for _ in range(ql_pairs):  # collinear partial overlaps (shared y, exact)
        x, y = pl.origin()
        length = float(rng.uniform(4e-4, 1e-3))
        gen.add(LineString((Coordinate(x, y), Coordinate(x + length, y))))
        gen.add(LineString((Coordinate(x + 0.5 * length, y), Coordinate(x + 1.5 * length, y))))
    for _ in range(ql_pairs):  # endpoint-touching pairs (shared vertex, exact)
        w1 = _rand_walk(pl, 2, 6)
        gen.add(w1)
        joint = w1.path[-1]
        ang = float(rng.uniform(0.0, 2.0 * math.pi))
        step = WALK_STEP
        second = Coordinate(joint.x + step * math.cos(ang), joint.y + step * math.sin(ang))
        gen.add(LineString((joint, second)))
    sub_hosts: list[LineString] = []
    for _ in range(ql_pairs):  # host walk plus an exact contiguous sub-path
        host = _rand_walk(pl, 5, 12)
        sub_hosts.append(host)
        gen.add(host)
        n = len(host.path)
        i0 = int(rng.integers(1, n - 2))
        j0 = int(rng.integers(i0 + 1, n - 1))
        gen.add(LineString(host.path[i0 : j0 + 1]))

    line_records = [r for r in gen.records if r.geometry.kind == "LineString"]
    dup_lines = line_records[:q_line]
    for rec in dup_lines:
        gen.dup(rec)
    for p in hub_cross:  # six lines crossing one polygon
        for k in range(6):
            gen.add(crossing_line(p, k % 2 == 0))

    used = gen.counts["LineString"]
    for _ in range(max(0, spt - used)):
        gen.add(_rand_walk(pl))

    # --- points ---
    for p in hub_within:  # six points strictly inside one polygon
        x0, y0, x1, y1 = _rect_bounds(p)
        for _ in range(6):
            px = float(rng.uniform(x0 + 0.1 * (x1 - x0), x1 - 0.1 * (x1 - x0)))
            py = float(rng.uniform(y0 + 0.1 * (y1 - y0), y1 - 0.1 * (y1 - y0)))
            gen.add(Point(Coordinate(px, py)))
    for p in hub_touch:  # corners and edge midpoints, exact boundary incidences
        x0, y0, x1, y1 = _rect_bounds(p)
        for c in (
            Coordinate(x0, y0),
            Coordinate(x1, y1),
            Coordinate(x0, (y0 + y1) / 2.0),
            Coordinate(x1, (y0 + y1) / 2.0),
            Coordinate((x0 + x1) / 2.0, y0),
            Coordinate((x0 + x1) / 2.0, y1),
        ):
            gen.add(Point(c))
    for p in hub_near:  # six near points on axis directions, gaps < near radius
        x0, y0, x1, y1 = _rect_bounds(p)
        for k in range(6):
            gap = float(rng.uniform(5e-5, 2.5e-3))
            ys = float(rng.uniform(y0, y1))
            xs = float(rng.uniform(x0, x1))
            c = [
                Coordinate(x1 + gap, ys),
                Coordinate(x0 - gap, ys),
                Coordinate(xs, y1 + gap),
                Coordinate(xs, y0 - gap),
            ][k % 4]
            gen.add(Point(c))
    for stack in stacks:  # the shared center point of each containment stack
        inner = stack[-1]
        x0, y0, x1, y1 = _rect_bounds(inner)
        gen.add(Point(Coordinate((x0 + x1) / 2.0, (y0 + y1) / 2.0)))

    for i in range(q_pt):  # points at interior vertices of walks (exact)
        if sub_hosts:
            host = sub_hosts[i % len(sub_hosts)]
            vi = 1 + i % (len(host.path) - 2)
            gen.add(Point(host.path[vi]))
    for i in range(q_pt):  # points at walk endpoints (exact)
        if line_records:
            path = line_records[i % len(line_records)].geometry.path
            gen.add(Point(path[0] if i % 2 == 0 else path[-1]))
    for i in range(q_pt):  # near-polygon points
        if anchors:
            x0, y0, x1, y1 = _rect_bounds(anchors[i % len(anchors)])
            gap = float(rng.uniform(5e-5, 2.5e-3))
            gen.add(Point(Coordinate(x1 + gap, float(rng.uniform(y0, y1)))))

    point_records = [r for r in gen.records if r.geometry.kind == "Point"]
    for rec in point_records[:q_pt]:  # exact duplicates
        gen.dup(rec)

    used = gen.counts["Point"]
    for _ in range(max(0, spt - used)):
        x, y = pl.origin()
        gen.add(Point(Coordinate(x, y)))

    # Trim overshoot deterministically (structured groups may exceed spt at
    # tiny scales); keep the first spt of each type in generation order.
    kept: list[GeometryRecord] = []
    seen = {"Point": 0, "LineString": 0, "Polygon": 0}
    for rec in gen.records:
        if seen[rec.geometry.kind] < spt:
            seen[rec.geometry.kind] += 1
            kept.append(rec)
    return kept


# --- ground truth tables -----------------------------------------------------


def build_attribute_table(records: list[GeometryRecord]) -> list[GeometryAttributeRecord]:
    """One row per record with type, area and centroid."""
    return [
        GeometryAttributeRecord(rec.id, rec.geometry.kind, area(rec.geometry), centroid(rec.geometry))
        for rec in records
    ]


def _join_with_distance(records: list[GeometryRecord], radius: float):
    """Ordered (subject, object, distance) for all pairs within radius, self excluded."""
    idx = build_index(records)
    by_id = {rec.id: rec for rec in records}
    out = []
    for rec in records:
        qbox = bbox_of(rec.geometry).expanded(radius)
        for oid in sorted(query_bbox(idx, qbox)):
            if oid == rec.id:
                continue
            d = min_distance(rec.geometry, by_id[oid].geometry)
            if d <= radius:
                out.append((rec.id, oid, d))
    out.sort()
    return out


def build_relation_triplets(records: list[GeometryRecord], cfg: BuilderConfig) -> TripletBuild:
    """Spatially joined pairs classified and down-sampled to the per-category
    quota, plus rejection-sampled disjoint pairs. Shortfalls are recorded,
    never fatal."""
    by_id = {rec.id: rec for rec in records}
    buckets: dict[str, list[RelationTriplet]] = {}
    dropped = 0
    for sid, oid, dist in _join_with_distance(records, 0.0):
        gs = by_id[sid].geometry
        go = by_id[oid].geometry
        label = classify_relation(gs, go)
        if label == "intersects":
            dropped += 1
            continue
        cat = _category(gs.kind, label, go.kind)
        buckets.setdefault(cat, []).append(RelationTriplet(sid, label, oid, dist))

    rng = np.random.default_rng([cfg.seed, 3])
    triplets: list[RelationTriplet] = []
    counts: dict[str, int] = {}
    shortfalls: dict[str, int] = {}
    for cat in sorted(buckets):
        group = buckets[cat]
        if len(group) > cfg.triplet_quota:
            pick = rng.choice(len(group), size=cfg.triplet_quota, replace=False)
            group = [group[i] for i in sorted(pick)]
        counts[cat] = len(group)
        triplets.extend(group)

    # Disjoint pairs: uniform rejection sampling per type pair.
    by_kind: dict[str, list[GeometryRecord]] = {k: [] for k in GEOM_KINDS}
    for rec in records:
        by_kind[rec.geometry.kind].append(rec)
    rng_d = np.random.default_rng([cfg.seed, 4])
    for skind in GEOM_KINDS:
        for okind in GEOM_KINDS:
            subs = by_kind[skind]
            objs = by_kind[okind]
            cat = _category(skind, "disjoint", okind)
            if not subs or not objs:
                shortfalls[cat] = cfg.triplet_quota
                counts[cat] = 0
                continue
            got: list[RelationTriplet] = []
            used: set[tuple[str, str]] = set()
            attempts = 0
            limit = cfg.triplet_quota * 60
            while len(got) < cfg.triplet_quota and attempts < limit:
                attempts += 1
                s = subs[int(rng_d.integers(0, len(subs)))]
                o = objs[int(rng_d.integers(0, len(objs)))]
                if s.id == o.id or (s.id, o.id) in used:
                    continue
                d = min_distance(s.geometry, o.geometry)
                if d > 0.0:
                    used.add((s.id, o.id))
                    got.append(RelationTriplet(s.id, "disjoint", o.id, d))
            counts[cat] = len(got)
            if len(got) < cfg.triplet_quota:
                shortfalls[cat] = cfg.triplet_quota - len(got)
            triplets.extend(got)

    for cat, n in counts.items():
        if n < cfg.triplet_quota and cat not in shortfalls:
            shortfalls[cat] = cfg.triplet_quota - n
    return TripletBuild(triplets, counts, shortfalls, dropped)


def build_location_queries(records: list[GeometryRecord], cfg: BuilderConfig) -> QueryBuild:
    """Per (predicate, object type): up to the configured number of objects
    related to more than min_subjects subjects by that predicate. Plain
    disjoint is excluded; disjoint pairs within the buffer radius enter as
    disjoint_but_near."""
    by_id = {rec.id: rec for rec in records}
    answer_sets: dict[tuple[str, str, str], set[str]] = {}
    for sid, oid, dist in _join_with_distance(records, cfg.near_radius):
        gs = by_id[sid].geometry
        go = by_id[oid].geometry
        if dist > 0.0:
            label = DISJOINT_BUT_NEAR
        else:
            label = classify_relation(gs, go)
            if label in ("intersects", "disjoint"):
                continue
        answer_sets.setdefault((label, go.kind, oid), set()).add(sid)

    grouped: dict[tuple[str, str], list[LocationQuery]] = {}
    for (pred, okind, oid), sids in answer_sets.items():
        if len(sids) > cfg.min_subjects:
            grouped.setdefault((pred, okind), []).append(
                LocationQuery(oid, pred, tuple(sorted(sids)))
            )

    rng = np.random.default_rng([cfg.seed, 5])
    queries: list[LocationQuery] = []
    counts: dict[str, int] = {}
    shortfalls: dict[str, int] = {}
    for pred in QUERY_PREDICATES:
        for okind in GEOM_KINDS:
            key = f"{pred}|{okind}"
            eligible = sorted(grouped.get((pred, okind), []), key=lambda lq: lq.object_id)
            if len(eligible) > cfg.location_objects:
                pick = rng.choice(len(eligible), size=cfg.location_objects, replace=False)
                eligible = [eligible[i] for i in sorted(pick)]
            counts[key] = len(eligible)
            if len(eligible) < cfg.location_objects:
                shortfalls[key] = cfg.location_objects - len(eligible)
            queries.extend(eligible)
    return QueryBuild(queries, counts, shortfalls)


# --- splits -------------------------------------------------------------------


def _largest_remainder(n: int, ratios) -> list[int]:
    exact = [r * n for r in ratios]
    base = [math.floor(e) for e in exact]
    rest = n - sum(base)
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - base[i]), i))
    for i in order[:rest]:
        base[i] += 1
    return base


SPLIT_NAMES = ("train", "validation", "test")


def split(
    dataset: TaskDataset,
    ratios: tuple[float, float, float],
    seed: int,
    stratify: bool | None = None,
) -> TaskDataset:
    """Seeded shuffle, then contiguous assignment to train/validation/test.

    Classification tasks (T1 geometry type, T4 predicate) stratify by target
    class so the tiny validation split keeps every class."""
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError("split ratios must sum to 1")
    if stratify is None:
        stratify = dataset.task_id in ("T1", "T4")
    n = len(dataset.examples)
    rng = np.random.default_rng([seed, 6])
    labels = [""] * n

    if stratify:
        by_class: dict[str, list[int]] = {}
        for i, ex in enumerate(dataset.examples):
            by_class.setdefault(str(ex.target), []).append(i)
        for cls in sorted(by_class):
            idxs = by_class[cls]
            if len(idxs) < len(ratios):
                raise ConfigError(
                    f"class {cls!r} has {len(idxs)} examples, fewer than {len(ratios)} splits"
                )
            perm = rng.permutation(len(idxs))
            counts = _largest_remainder(len(idxs), ratios)
            pos = 0
            for split_name, c in zip(SPLIT_NAMES, counts):
                for j in perm[pos : pos + c]:
                    labels[idxs[j]] = split_name
                pos += c
    else:
        perm = rng.permutation(n)
        counts = _largest_remainder(n, ratios)
        pos = 0
        for split_name, c in zip(SPLIT_NAMES, counts):
            for j in perm[pos : pos + c]:
                labels[j] = split_name
            pos += c

    out = TaskDataset(dataset.task_id)
    for ex, lab in zip(dataset.examples, labels):
        out.examples.append(TaskExample(ex.ids, ex.target, lab))
    return out


# --- task assembly -------------------------------------------------------------


def build_task_datasets(
    records: list[GeometryRecord],
    attributes: list[GeometryAttributeRecord],
    triplets: list[RelationTriplet],
    queries: list[LocationQuery],
    cfg: BuilderConfig,
) -> dict[str, TaskDataset]:
    """Assemble and split the six task datasets."""
    t1 = TaskDataset("T1", [TaskExample((a.id,), a.geom_type) for a in attributes])
    t2 = TaskDataset("T2", [TaskExample((a.id,), a.area) for a in attributes])
    t3 = TaskDataset(
        "T3", [TaskExample((a.id,), (a.centroid.x, a.centroid.y)) for a in attributes]
    )
    t4 = TaskDataset(
        "T4", [TaskExample((t.subject_id, t.object_id), t.predicate) for t in triplets]
    )
    t5 = TaskDataset(
        "T5",
        [
            TaskExample(
                (t.subject_id, t.object_id),
                {"distance": t.distance, "predicate": t.predicate},
            )
            for t in triplets
        ],
    )
    out = {
        ds.task_id: split(ds, cfg.split_ratios, cfg.seed) for ds in (t1, t2, t3, t4, t5)
    }
    # T6 is retrieval without training; every query is evaluation-only.
    t6 = TaskDataset("T6")
    for lq in queries:
        t6.examples.append(
            TaskExample((lq.object_id,), {"predicate": lq.predicate, "answers": list(lq.answers)}, "test")
        )
    out["T6"] = t6
    return out
