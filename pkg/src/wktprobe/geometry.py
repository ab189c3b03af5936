"""Geometry model and the WKT grammar for POINT / LINESTRING / POLYGON.

Coordinates are (longitude, latitude) = (x, y) in degrees, WKT axis order.
Parsing and serialization round-trip exactly: ``parse_wkt(format_wkt(g)) == g``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import EmptyGeometryError, UnsupportedTypeError, WKTSyntaxError

_GEOMETRY_KEYWORDS = ("POINT", "LINESTRING", "POLYGON")


@dataclass(frozen=True)
class Coordinate:
    """A lon/lat pair in degrees; both components finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise WKTSyntaxError(f"non-finite coordinate ({self.x}, {self.y})")


@dataclass(frozen=True)
class Point:
    point: Coordinate

    kind = "Point"


@dataclass(frozen=True)
class LineString:
    path: tuple[Coordinate, ...]

    kind = "LineString"

    def __post_init__(self):
        if len(self.path) < 2:
            raise WKTSyntaxError("LINESTRING needs at least 2 coordinates")

    @property
    def is_closed(self) -> bool:
        return self.path[0] == self.path[-1]


@dataclass(frozen=True)
class Polygon:
    exterior: tuple[Coordinate, ...]
    holes: tuple[tuple[Coordinate, ...], ...] = field(default_factory=tuple)

    kind = "Polygon"

    def __post_init__(self):
        for ring in (self.exterior, *self.holes):
            if len(ring) < 4:
                raise WKTSyntaxError("polygon ring needs at least 4 coordinates")
            if ring[0] != ring[-1]:
                raise WKTSyntaxError("polygon ring is not closed")

    @property
    def rings(self) -> tuple[tuple[Coordinate, ...], ...]:
        return (self.exterior, *self.holes)


Geometry = Union[Point, LineString, Polygon]


@dataclass(frozen=True)
class GeometryRecord:
    """A geometry under a collection-unique id with a free-form source tag."""

    id: str
    geometry: Geometry
    source: str = "synthetic"


# --- WKT lexer -------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<word>[A-Za-z]+)|(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<punct>[(),]))"
)


def _lex(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].strip()
            if not rest:
                break
            raise WKTSyntaxError(f"unexpected character at offset {pos}: {rest[:10]!r}")
        tokens.append(m.group(m.lastgroup))
        pos = m.end()
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise WKTSyntaxError("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise WKTSyntaxError(f"expected {tok!r}, got {got!r}")

    def done(self) -> bool:
        return self.i >= len(self.tokens)


def _parse_number(stream: _TokenStream) -> float:
    tok = stream.take()
    try:
        value = float(tok)
    except ValueError:
        raise WKTSyntaxError(f"expected number, got {tok!r}") from None
    if not math.isfinite(value):
        raise WKTSyntaxError(f"non-finite coordinate value {tok!r}")
    return value


def _parse_coordinate(stream: _TokenStream) -> Coordinate:
    x = _parse_number(stream)
    nxt = stream.peek()
    if nxt in (",", ")", None):
        raise WKTSyntaxError("coordinate needs two numbers")
    y = _parse_number(stream)
    nxt = stream.peek()
    if nxt not in (",", ")"):
        # A third number means Z/M coordinates, which we do not support.
        if nxt is not None and _is_number(nxt):
            raise UnsupportedTypeError("Z/M coordinates are not supported")
        raise WKTSyntaxError(f"unexpected token {nxt!r} after coordinate")
    return Coordinate(x, y)


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _parse_coordinate_seq(stream: _TokenStream) -> list[Coordinate]:
    stream.expect("(")
    coords = [_parse_coordinate(stream)]
    while stream.peek() == ",":
        stream.take()
        coords.append(_parse_coordinate(stream))
    stream.expect(")")
    return coords


def parse_wkt(text: str) -> Geometry:
    """Parse a WKT string into a Point, LineString or Polygon.

    Keyword match is case-insensitive and interior whitespace is flexible.
    Raises WKTSyntaxError on malformed input, UnsupportedTypeError for any
    type outside the three supported ones, EmptyGeometryError for EMPTY.
    """
    stream = _TokenStream(_lex(text))
    keyword = stream.take().upper()
    if keyword not in _GEOMETRY_KEYWORDS:
        if keyword.isalpha():
            raise UnsupportedTypeError(f"unsupported WKT type {keyword!r}")
        raise WKTSyntaxError(f"expected geometry keyword, got {keyword!r}")

    nxt = stream.peek()
    if nxt is not None and nxt.upper() == "EMPTY":
        raise EmptyGeometryError(f"{keyword} EMPTY is not supported")
    if nxt is not None and nxt.upper() in ("Z", "M", "ZM"):
        raise UnsupportedTypeError("Z/M coordinates are not supported")

    if keyword == "POINT":
        stream.expect("(")
        coord = _parse_coordinate(stream)
        stream.expect(")")
        geom: Geometry = Point(coord)
    elif keyword == "LINESTRING":
        coords = _parse_coordinate_seq(stream)
        if len(coords) < 2:
            raise WKTSyntaxError("LINESTRING needs at least 2 coordinates")
        geom = LineString(tuple(coords))
    else:  # POLYGON
        stream.expect("(")
        rings = [_parse_ring(stream)]
        while stream.peek() == ",":
            stream.take()
            rings.append(_parse_ring(stream))
        stream.expect(")")
        geom = Polygon(rings[0], tuple(rings[1:]))

    if not stream.done():
        raise WKTSyntaxError(f"trailing tokens after geometry: {stream.peek()!r}")
    return geom


def _parse_ring(stream: _TokenStream) -> tuple[Coordinate, ...]:
    coords = _parse_coordinate_seq(stream)
    if len(coords) < 4:
        raise WKTSyntaxError("polygon ring needs at least 4 coordinates")
    if coords[0] != coords[-1]:
        raise WKTSyntaxError("polygon ring is not closed")
    return tuple(coords)


# --- WKT writer ------------------------------------------------------------


def _fmt_value(v: float) -> str:
    # Shortest decimal representation that round-trips; integral values
    # print without a trailing ".0" so "POINT (30 10)" stays canonical.
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _fmt_coord(c: Coordinate) -> str:
    return f"{_fmt_value(c.x)} {_fmt_value(c.y)}"


def _fmt_ring(ring: tuple[Coordinate, ...]) -> str:
    return "(" + ", ".join(_fmt_coord(c) for c in ring) + ")"


def format_wkt(g: Geometry) -> str:
    """Serialize a geometry to canonical WKT (uppercase keyword, ', ' separators)."""
    if isinstance(g, Point):
        return f"POINT ({_fmt_coord(g.point)})"
    if isinstance(g, LineString):
        return "LINESTRING (" + ", ".join(_fmt_coord(c) for c in g.path) + ")"
    if isinstance(g, Polygon):
        return "POLYGON (" + ", ".join(_fmt_ring(r) for r in g.rings) + ")"
    raise TypeError(f"not a geometry: {g!r}")


def coords_of(g: Geometry) -> Iterator[Coordinate]:
    """All coordinates of a geometry, rings flattened."""
    if isinstance(g, Point):
        yield g.point
    elif isinstance(g, LineString):
        yield from g.path
    else:
        for ring in g.rings:
            yield from ring
