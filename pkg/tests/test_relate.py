import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_classify, to_shapely
from wktprobe.errors import DegenerateGeometryError
from wktprobe.geometry import Coordinate, Polygon, parse_wkt
from wktprobe.measures import min_distance
from wktprobe.relate import (
    DE9IM,
    classify_relation,
    de9im,
    is_disjoint_but_near,
    named_predicates,
)

UNIT_SQUARE = parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))")


# Expected matrices below were cross-checked against the GIS oracle
# (see test_matrices_match_oracle_on_corpus for the live comparison).
def test_point_in_polygon_matrix():
    assert str(de9im(parse_wkt("POINT (0.5 0.5)"), UNIT_SQUARE)) == "0FFFFF212"


def test_disjoint_points_matrix():
    assert str(de9im(parse_wkt("POINT (0 0)"), parse_wkt("POINT (5 5)"))) == "FF0FFF0F2"


def test_identical_polygons_matrix():
    assert str(de9im(UNIT_SQUARE, UNIT_SQUARE)) == "2FFF1FFF2"


def test_edge_sharing_squares_touch():
    right = parse_wkt("POLYGON ((1 0, 1 1, 2 1, 2 0, 1 0))")
    m = de9im(UNIT_SQUARE, right)
    assert str(m) == "FF2F11212"
    assert classify_relation(UNIT_SQUARE, right) == "touches"


def test_named_predicates_point_in_polygon():
    m = DE9IM("0FFFFF212")
    assert named_predicates(m, "Point", "Polygon") == {"within", "intersects"}


def test_named_predicates_disjoint():
    m = DE9IM("FF0FFF0F2")
    assert named_predicates(m, "Point", "Point") == {"disjoint"}


def test_named_predicates_equal_polygons():
    m = DE9IM("2FFF1FFF2")
    assert named_predicates(m, "Polygon", "Polygon") == {
        "equals",
        "within",
        "contains",
        "intersects",
    }


def test_classify_point_within_polygon():
    assert classify_relation(parse_wkt("POINT (0.5 0.5)"), UNIT_SQUARE) == "within"


def test_classify_identical_geometries():
    assert classify_relation(UNIT_SQUARE, UNIT_SQUARE) == "equals"
    line = parse_wkt("LINESTRING (0 0, 1 1)")
    assert classify_relation(line, line) == "equals"


def test_degenerate_self_intersecting_ring():
    bowtie = Polygon(
        (
            Coordinate(0, 0),
            Coordinate(1, 1),
            Coordinate(1, 0),
            Coordinate(0, 1),
            Coordinate(0, 0),
        )
    )
    with pytest.raises(DegenerateGeometryError):
        de9im(bowtie, UNIT_SQUARE)


def test_is_disjoint_but_near():
    near = parse_wkt("POLYGON ((1.001 0, 1.001 1, 2 1, 2 0, 1.001 0))")
    far = parse_wkt("POLYGON ((1.01 0, 1.01 1, 2 1, 2 0, 1.01 0))")
    touching = parse_wkt("POLYGON ((1 0, 1 1, 2 1, 2 0, 1 0))")
    assert is_disjoint_but_near(UNIT_SQUARE, near, 0.003)
    assert not is_disjoint_but_near(UNIT_SQUARE, far, 0.003)
    assert not is_disjoint_but_near(UNIT_SQUARE, touching, 0.003)


def test_transpose_symmetry_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs[:200]:
        assert str(de9im(ga.geometry, gb.geometry).transpose()) == str(
            de9im(gb.geometry, ga.geometry)
        )


def test_within_contains_duality_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs[:200]:
        mab = de9im(ga.geometry, gb.geometry)
        mba = de9im(gb.geometry, ga.geometry)
        pab = named_predicates(mab, ga.geometry.kind, gb.geometry.kind)
        pba = named_predicates(mba, gb.geometry.kind, ga.geometry.kind)
        assert ("within" in pab) == ("contains" in pba)
        assert ("equals" in pab) == ("within" in pab and "contains" in pab)


def test_intersects_iff_not_disjoint_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs[:200]:
        m = de9im(ga.geometry, gb.geometry)
        preds = named_predicates(m, ga.geometry.kind, gb.geometry.kind)
        assert ("intersects" in preds) != ("disjoint" in preds)


def test_disjoint_iff_positive_distance_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs[:200]:
        m = de9im(ga.geometry, gb.geometry)
        preds = named_predicates(m, ga.geometry.kind, gb.geometry.kind)
        d = min_distance(ga.geometry, gb.geometry)
        assert ("disjoint" in preds) == (d > 0.0)


def test_matrices_match_oracle_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs[:250]:
        ours = str(de9im(ga.geometry, gb.geometry))
        theirs = to_shapely(ga.geometry).relate(to_shapely(gb.geometry))
        assert ours == theirs, f"{ga.id} vs {gb.id}: {ours} != {theirs}"


def test_classification_matches_oracle_on_corpus(corpus_pairs):
    for ga, gb in corpus_pairs:
        ours = classify_relation(ga.geometry, gb.geometry)
        theirs = oracle_classify(to_shapely(ga.geometry), to_shapely(gb.geometry))
        assert ours == theirs, f"{ga.id} vs {gb.id}: {ours} != {theirs}"


# Closed linestrings have ring semantics: no boundary.
def test_closed_line_has_empty_boundary():
    ring_line = parse_wkt("LINESTRING (0 0, 1 0, 1 1, 0 1, 0 0)")
    pt = parse_wkt("POINT (0 0)")
    m = de9im(pt, ring_line)
    assert str(m) == to_shapely(pt).relate(to_shapely(ring_line))
    # The start/end vertex is interior, not boundary.
    assert m.cells[0] == "0"


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_matrix_mask_semantics(seed):
    import numpy as np

    rng = np.random.default_rng(seed)
    cells = "".join(rng.choice(list("F012"), size=9))
    cells = cells[:8] + "2"
    m = DE9IM(cells)
    assert m.matches(cells)
    assert m.matches("*********")
    for i, c in enumerate(cells):
        mask = list("*********")
        mask[i] = "T"
        assert m.matches("".join(mask)) == (c != "F")
