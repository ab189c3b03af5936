import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wktprobe.errors import (
    EmptyGeometryError,
    ProbeError,
    UnsupportedTypeError,
    WKTSyntaxError,
)
from wktprobe.geometry import (
    Coordinate,
    LineString,
    Point,
    Polygon,
    format_wkt,
    parse_wkt,
)


def test_parse_linestring_example():
    g = parse_wkt("LINESTRING (30 10, 10 30, 40 40)")
    assert isinstance(g, LineString)
    assert [(c.x, c.y) for c in g.path] == [(30, 10), (10, 30), (40, 40)]


def test_parse_polygon_mixed_case_no_holes():
    g = parse_wkt("Polygon ((0 0, 0 1, 1 1, 1 0, 0 0))")
    assert isinstance(g, Polygon)
    assert len(g.exterior) == 5
    assert g.holes == ()


def test_parse_point_single_number_is_syntax_error():
    with pytest.raises(WKTSyntaxError):
        parse_wkt("POINT (30)")


def test_format_point_integral():
    assert format_wkt(Point(Coordinate(30.0, 10.0))) == "POINT (30 10)"


def test_format_unit_square():
    square = parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))")
    assert format_wkt(square) == "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))"


@pytest.mark.parametrize(
    "text,err",
    [
        ("MULTIPOLYGON (((0 0, 0 1, 1 1, 0 0)))", UnsupportedTypeError),
        ("GEOMETRYCOLLECTION (POINT (1 2))", UnsupportedTypeError),
        ("TRIANGLE ((0 0, 1 0, 0 1, 0 0))", UnsupportedTypeError),
        ("POINT EMPTY", EmptyGeometryError),
        ("LINESTRING EMPTY", EmptyGeometryError),
        ("POINT Z (1 2 3)", UnsupportedTypeError),
        ("POINT (1 2 3)", UnsupportedTypeError),
        ("POINT (1, 2)", WKTSyntaxError),
        ("LINESTRING (30 10)", WKTSyntaxError),
        ("POLYGON ((0 0, 0 1, 1 1))", WKTSyntaxError),
        ("POLYGON ((0 0, 0 1, 1 1, 1 0))", WKTSyntaxError),
        ("POINT (nan nan)", WKTSyntaxError),
        ("POINT (1e999 0)", WKTSyntaxError),
        ("POINT 1 2", WKTSyntaxError),
        ("POINT (1 2) extra", ProbeError),
        ("", WKTSyntaxError),
        ("(1 2)", WKTSyntaxError),
    ],
)
def test_parse_rejections(text, err):
    with pytest.raises(err):
        parse_wkt(text)


def test_case_insensitive_keywords():
    for text in ("point (3 4)", "Point(3 4)", "POINT  ( 3   4 )"):
        assert parse_wkt(text) == Point(Coordinate(3, 4))


def test_linestring_needs_two_coordinates():
    with pytest.raises(WKTSyntaxError):
        LineString((Coordinate(0, 0),))


def test_ring_must_close():
    with pytest.raises(WKTSyntaxError):
        Polygon(
            (Coordinate(0, 0), Coordinate(0, 1), Coordinate(1, 1), Coordinate(1, 0))
        )


def test_coordinate_must_be_finite():
    with pytest.raises(WKTSyntaxError):
        Coordinate(float("nan"), 0.0)
    with pytest.raises(WKTSyntaxError):
        Coordinate(0.0, float("inf"))


finite = st.floats(
    allow_nan=False, allow_infinity=False, min_value=-1e9, max_value=1e9
)
positive = st.floats(min_value=1e-9, max_value=1e3)


@st.composite
def geometries(draw):
    kind = draw(st.sampled_from(["point", "line", "rect"]))
    if kind == "point":
        return Point(Coordinate(draw(finite), draw(finite)))
    if kind == "line":
        n = draw(st.integers(min_value=2, max_value=8))
        return LineString(
            tuple(Coordinate(draw(finite), draw(finite)) for _ in range(n))
        )
    x0, y0 = draw(finite), draw(finite)
    w, h = draw(positive), draw(positive)
    ring = (
        Coordinate(x0, y0),
        Coordinate(x0, y0 + h),
        Coordinate(x0 + w, y0 + h),
        Coordinate(x0 + w, y0),
        Coordinate(x0, y0),
    )
    return Polygon(ring)


@given(geometries())
@settings(max_examples=300)
def test_roundtrip_identity(g):
    assert parse_wkt(format_wkt(g)) == g


@given(geometries())
@settings(max_examples=100)
def test_roundtrip_case_insensitive(g):
    text = format_wkt(g)
    assert parse_wkt(text.lower()) == parse_wkt(text)


def _mutants(text):
    """One structural token (parenthesis, comma, keyword letter) mutated."""
    out = []
    for i, ch in enumerate(text):
        if ch in "(),":
            out.append(text[:i] + text[i + 1 :])  # drop
            out.append(text[:i] + ch + ch + text[i + 1 :])  # double
            if ch == "(":
                out.append(text[:i] + ")" + text[i + 1 :])  # flip
        elif ch.isalpha():
            out.append(text[:i] + "Q" + text[i + 1 :])  # corrupt keyword
    return out


BASE_WKTS = [
    "POINT (30 10)",
    "POINT (-89.38 43.07)",
    "LINESTRING (30 10, 10 30, 40 40)",
    "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))",
    "POLYGON ((0 0, 0 3, 3 3, 3 0, 0 0), (1 1, 1 2, 2 2, 2 1, 1 1))",
]


def test_mutation_corpus_rejected():
    mutants = [m for base in BASE_WKTS for m in _mutants(base)]
    assert len(mutants) >= 100
    for m in mutants:
        with pytest.raises(ProbeError):
            parse_wkt(m)


def test_fuzzy_garbage_rejected():
    for text in ("@", "POINT (30 10) ;", "POLYGON [0 0]", "1234", "POINT ()"):
        with pytest.raises(ProbeError):
            parse_wkt(text)
