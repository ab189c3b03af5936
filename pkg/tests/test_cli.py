import json
from pathlib import Path

import pytest

from wktprobe.cli import main
from wktprobe.encoding import read_cache
from wktprobe.files import (
    load_geojson,
    load_relation_table,
    load_wkt_lines,
    read_json,
    write_wkt_lines,
)
from wktprobe.errors import DataFormatError, UnsupportedTypeError


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    root = tmp_path_factory.mktemp("cliwork")
    cfg = {
        "builder": {
            "samples_per_type": 120,
            "triplet_quota": 10,
            "location_objects": 5,
            "seed": 5,
        },
        "hyperparams": {"max_epochs": 8, "patience": 8, "seed": 2},
    }
    cfg_path = root / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    data = root / "data"
    assert main(["generate", "--config", str(cfg_path), "--out", str(data)]) == 0
    assert main(["truth", "--in", str(data)]) == 0
    cache = data / "reference.cache"
    assert main(["encode", "--encoder", "reference", "--in", str(data), "--cache", str(cache)]) == 0
    return root, data, cache


def test_generate_outputs(workdir):
    _, data, _ = workdir
    records = load_wkt_lines(data / "geometries.wkt")
    assert len(records) == 360
    manifest = read_json(data / "manifest.json")
    assert manifest["record_counts"] == {"Point": 120, "LineString": 120, "Polygon": 120}


def test_truth_outputs(workdir):
    _, data, _ = workdir
    triplets = load_relation_table(data / "relations.tsv")
    assert triplets
    for t in triplets[:20]:
        assert t.predicate in {
            "within",
            "contains",
            "crosses",
            "touches",
            "overlaps",
            "equals",
            "disjoint",
        }
    for task in ("t1", "t2", "t3", "t4", "t5", "t6"):
        assert (data / "tasks" / f"{task}.jsonl").exists()


def test_encode_cache_covers_geometries_and_phrases(workdir):
    _, data, cache = workdir
    vectors = read_cache(cache)
    records = load_wkt_lines(data / "geometries.wkt")
    for rec in records[:10]:
        assert rec.id in vectors
        assert vectors[rec.id].shape == (768,)
    assert any(k.startswith("rel:") for k in vectors)


def test_run_and_report(workdir, tmp_path):
    _, data, cache = workdir
    rep_dir = tmp_path / "reports"
    for task, variant in [("t1", None), ("t2", "polygon_only"), ("t6", None)]:
        argv = [
            "run",
            "--task",
            task,
            "--in",
            str(data),
            "--out",
            str(rep_dir),
            "--cache",
            str(cache),
            "--seed",
            "2",
        ]
        if variant:
            argv += ["--variant", variant]
        assert main(argv) == 0
    assert main(["report", "--in", str(rep_dir)]) == 0
    results = read_json(rep_dir / "results.json")
    assert {r["task_id"] for r in results} == {"T1", "T2", "T6"}
    table = (rep_dir / "table.txt").read_text()
    assert "T1: Geometry type" in table


def test_usage_errors():
    assert main([]) == 1
    assert main(["run", "--task", "t1"]) == 1  # missing --in/--out
    assert main(["frobnicate"]) == 1


def test_unknown_task_is_usage_error(workdir, tmp_path):
    _, data, _ = workdir
    code = main(["run", "--task", "t9", "--in", str(data), "--out", str(tmp_path)])
    assert code == 1


def test_data_error_missing_dir(tmp_path):
    assert main(["truth", "--in", str(tmp_path / "nope")]) == 2


def test_provider_error_exit_code(workdir, tmp_path):
    _, data, _ = workdir
    code = main(
        [
            "encode",
            "--encoder",
            "provider",
            "--endpoint",
            "http://127.0.0.1:9",
            "--in",
            str(data),
            "--cache",
            str(tmp_path / "x.cache"),
        ]
    )
    assert code == 3


def test_report_empty_dir_is_data_error(tmp_path):
    assert main(["report", "--in", str(tmp_path)]) == 2


# --- file format loaders --------------------------------------------------------


def test_wkt_lines_roundtrip(tmp_path, workdir):
    _, data, _ = workdir
    records = load_wkt_lines(data / "geometries.wkt")[:25]
    path = tmp_path / "subset.wkt"
    write_wkt_lines(records, path)
    again = load_wkt_lines(path)
    assert again == records


def test_wkt_lines_rejects_duplicates(tmp_path):
    path = tmp_path / "dup.wkt"
    path.write_text("a\tPOINT (1 2)\tsrc\na\tPOINT (3 4)\tsrc\n")
    with pytest.raises(DataFormatError):
        load_wkt_lines(path)


def test_wkt_lines_rejects_bad_field_count(tmp_path):
    path = tmp_path / "bad.wkt"
    path.write_text("a\tPOINT (1 2)\n")
    with pytest.raises(DataFormatError):
        load_wkt_lines(path)


def test_geojson_loader(tmp_path):
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "id": "pt1",
                "properties": {"source": "poi"},
                "geometry": {"type": "Point", "coordinates": [30.0, 10.0]},
            },
            {
                "type": "Feature",
                "properties": {},
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]]],
                },
            },
            {
                "type": "Feature",
                "properties": {},
                "geometry": {"type": "LineString", "coordinates": [[0, 0], [1, 1]]},
            },
        ],
    }
    path = tmp_path / "data.geojson"
    path.write_text(json.dumps(doc))
    records = load_geojson(path)
    assert [r.id for r in records] == ["pt1", "1", "2"]
    assert records[0].source == "poi"
    assert records[1].geometry.kind == "Polygon"


def test_geojson_rejects_multigeometry(tmp_path):
    doc = {
        "type": "FeatureCollection",
        "features": [
            {
                "type": "Feature",
                "properties": {},
                "geometry": {"type": "MultiPoint", "coordinates": [[0, 0]]},
            }
        ],
    }
    path = tmp_path / "bad.geojson"
    path.write_text(json.dumps(doc))
    with pytest.raises(UnsupportedTypeError):
        load_geojson(path)
