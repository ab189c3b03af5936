import numpy as np
import pytest
import shapely.wkt

from wktprobe.datasets import BuilderConfig, generate_synthetic
from wktprobe.geometry import format_wkt


def to_shapely(g):
    """Convert one of our geometries to the oracle's representation."""
    return shapely.wkt.loads(format_wkt(g))


def oracle_classify(sa, sb) -> str:
    """Single-label classification using the oracle's own predicate calls,
    most-specific first; mirrors the engine's collapse order."""
    if sa.equals(sb):
        return "equals"
    if sa.within(sb):
        return "within"
    if sa.contains(sb):
        return "contains"
    if sa.crosses(sb):
        return "crosses"
    if sa.overlaps(sb):
        return "overlaps"
    if sa.touches(sb):
        return "touches"
    if sa.disjoint(sb):
        return "disjoint"
    return "intersects"


@pytest.fixture(scope="session")
def small_corpus():
    """Structured synthetic corpus shared by oracle-parity style tests."""
    cfg = BuilderConfig(samples_per_type=120, triplet_quota=12, location_objects=6, seed=42)
    return generate_synthetic(cfg)


@pytest.fixture(scope="session")
def corpus_pairs(small_corpus):
    """500 seeded pairs: spatially joined pairs (rich predicate mix) plus
    random pairs (mostly disjoint)."""
    from wktprobe.gridindex import join_pairs

    records = small_corpus
    by_id = {r.id: r for r in records}
    joined = join_pairs(records, records, 0.0)
    joined = [(s, o) for s, o in joined if s != o]
    rng = np.random.default_rng(424242)
    pairs = []
    if len(joined) > 300:
        pick = rng.choice(len(joined), size=300, replace=False)
        pairs.extend(joined[i] for i in sorted(pick))
    else:
        pairs.extend(joined)
    ids = sorted(by_id)
    while len(pairs) < 500:
        a = ids[int(rng.integers(0, len(ids)))]
        b = ids[int(rng.integers(0, len(ids)))]
        if a != b:
            pairs.append((a, b))
    return [(by_id[a], by_id[b]) for a, b in pairs[:500]]
