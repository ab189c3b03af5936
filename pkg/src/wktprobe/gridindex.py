"""Uniform grid index for bbox queries and distance-threshold spatial joins.

The grid is a candidate generator: queries return every record whose bbox
intersects the query box, and join_pairs follows up with exact distance
filtering, so results are independent of the cell size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import Geometry, GeometryRecord
from .measures import bbox as geom_bbox
from .measures import min_distance

DEFAULT_CELL = 0.005


@dataclass(frozen=True)
class BBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if self.min_x > self.max_x or self.min_y > self.max_y:
            raise ValueError("bbox min exceeds max")

    def intersects(self, other: "BBox") -> bool:
        return not (
            self.min_x > other.max_x
            or other.min_x > self.max_x
            or self.min_y > other.max_y
            or other.min_y > self.max_y
        )

    def expanded(self, radius: float) -> "BBox":
        return BBox(
            self.min_x - radius,
            self.min_y - radius,
            self.max_x + radius,
            self.max_y + radius,
        )

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y


def bbox_of(g: Geometry) -> BBox:
    return BBox(*geom_bbox(g))


@dataclass
class GridIndex:
    cell: float
    cells: dict[tuple[int, int], list[str]] = field(default_factory=dict)
    boxes: dict[str, BBox] = field(default_factory=dict)

    def _cell_range(self, box: BBox):
        c = self.cell
        return (
            math.floor(box.min_x / c),
            math.floor(box.max_x / c),
            math.floor(box.min_y / c),
            math.floor(box.max_y / c),
        )

    def insert(self, rid: str, box: BBox) -> None:
        if rid in self.boxes:
            raise ValueError(f"duplicate record id {rid!r}")
        self.boxes[rid] = box
        x0, x1, y0, y1 = self._cell_range(box)
        for cx in range(x0, x1 + 1):
            for cy in range(y0, y1 + 1):
                self.cells.setdefault((cx, cy), []).append(rid)


def build_index(records: list[GeometryRecord], cell: float = DEFAULT_CELL) -> GridIndex:
    """Index every record's bbox into all grid cells it overlaps."""
    if cell <= 0:
        raise ValueError("cell size must be positive")
    idx = GridIndex(cell)
    for rec in records:
        idx.insert(rec.id, bbox_of(rec.geometry))
    return idx


def query_bbox(idx: GridIndex, box: BBox) -> set[str]:
    """Ids of all records whose bbox intersects the query box (no false negatives)."""
    x0, x1, y0, y1 = idx._cell_range(box)
    hits: set[str] = set()
    # For huge query boxes, scanning the occupied cells beats enumerating
    # the full cell range.
    if (x1 - x0 + 1) * (y1 - y0 + 1) > len(idx.cells):
        for (cx, cy), rids in idx.cells.items():
            if x0 <= cx <= x1 and y0 <= cy <= y1:
                for rid in rids:
                    if rid not in hits and idx.boxes[rid].intersects(box):
                        hits.add(rid)
        return hits
    for cx in range(x0, x1 + 1):
        for cy in range(y0, y1 + 1):
            for rid in idx.cells.get((cx, cy), ()):
                if rid not in hits and idx.boxes[rid].intersects(box):
                    hits.add(rid)
    return hits


def join_pairs(
    subjects: list[GeometryRecord],
    objects: list[GeometryRecord],
    radius: float = 0.0,
    cell: float = DEFAULT_CELL,
) -> list[tuple[str, str]]:
    """All (subject_id, object_id) pairs with min_distance <= radius.

    Candidates come from the grid; the exact min_distance filter decides.
    Output is sorted by (subject_id, object_id) for determinism.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    idx = build_index(objects, cell)
    by_id = {rec.id: rec for rec in objects}
    pairs: list[tuple[str, str]] = []
    for sub in subjects:
        qbox = bbox_of(sub.geometry).expanded(radius)
        for oid in query_bbox(idx, qbox):
            if min_distance(sub.geometry, by_id[oid].geometry) <= radius:
                pairs.append((sub.id, oid))
    pairs.sort()
    return pairs
