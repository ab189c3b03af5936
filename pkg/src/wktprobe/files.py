"""On-disk formats: WKT-lines, GeoJSON, relation tables, task datasets.

WKT-lines: one record per line, "<id>\\t<wkt>\\t<source>".
Relation table: one triplet per line, "<subject_id>\\t<predicate>\\t<object_id>\\t<distance>".
Task files: JSON lines, {"ids": [...], "target": ..., "split": ...} per example.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .errors import DataFormatError, UnsupportedTypeError
from .geometry import (
    Coordinate,
    Geometry,
    GeometryRecord,
    LineString,
    Point,
    Polygon,
    format_wkt,
    parse_wkt,
)


def write_wkt_lines(records: Iterable[GeometryRecord], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(f"{rec.id}\t{format_wkt(rec.geometry)}\t{rec.source}\n")
            n += 1
    return n


def load_wkt_lines(path: str | Path) -> list[GeometryRecord]:
    records: list[GeometryRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 3 tab-separated fields")
            rid, wkt, source = parts
            if rid in seen:
                raise DataFormatError(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            records.append(GeometryRecord(rid, parse_wkt(wkt), source))
    return records


def _coord(values) -> Coordinate:
    if not isinstance(values, (list, tuple)) or len(values) < 2:
        raise DataFormatError(f"bad GeoJSON position {values!r}")
    return Coordinate(float(values[0]), float(values[1]))


def geometry_from_geojson(obj: dict) -> Geometry:
    gtype = obj.get("type")
    coords = obj.get("coordinates")
    if gtype == "Point":
        return Point(_coord(coords))
    if gtype == "LineString":
        return LineString(tuple(_coord(c) for c in coords))
    if gtype == "Polygon":
        rings = [tuple(_coord(c) for c in ring) for ring in coords]
        if not rings:
            raise DataFormatError("polygon without rings")
        return Polygon(rings[0], tuple(rings[1:]))
    raise UnsupportedTypeError(f"unsupported GeoJSON geometry type {gtype!r}")


def load_geojson(path: str | Path) -> list[GeometryRecord]:
    """Load a FeatureCollection of Point/LineString/Polygon features.

    Ids come from the feature "id" member when present, else the feature index.
    """
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "FeatureCollection":
        raise DataFormatError("expected a GeoJSON FeatureCollection")
    records: list[GeometryRecord] = []
    seen: set[str] = set()
    for i, feature in enumerate(doc.get("features", [])):
        rid = str(feature.get("id", i))
        if rid in seen:
            raise DataFormatError(f"duplicate feature id {rid!r}")
        seen.add(rid)
        geom = geometry_from_geojson(feature.get("geometry") or {})
        props = feature.get("properties") or {}
        records.append(GeometryRecord(rid, geom, str(props.get("source", "geojson"))))
    return records


def write_relation_table(triplets, path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for t in triplets:
            fh.write(f"{t.subject_id}\t{t.predicate}\t{t.object_id}\t{t.distance!r}\n")
            n += 1
    return n


def load_relation_table(path: str | Path):
    from .datasets import RelationTriplet

    triplets = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise DataFormatError(f"{path}:{lineno}: expected 4 tab-separated fields")
            sid, pred, oid, dist = parts
            triplets.append(RelationTriplet(sid, pred, oid, float(dist)))
    return triplets


def write_jsonl(rows: Iterable[dict], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def write_json(obj, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
