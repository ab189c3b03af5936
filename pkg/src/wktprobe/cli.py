"""Command-line pipeline: generate -> truth -> encode -> run -> report.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import files
from .datasets import (
    BuilderConfig,
    LocationQuery,
    TaskDataset,
    TaskExample,
    build_attribute_table,
    build_location_queries,
    build_relation_triplets,
    build_task_datasets,
    generate_synthetic,
)
from .encoding import (
    EncoderHandle,
    RelationPhrase,
    embed_texts,
    phrase_cache_id,
    read_cache,
    write_cache,
)
from .errors import ProbeError, ProviderError
from .geometry import format_wkt
from .mlp import Hyperparams
from .tasks import (
    MetricsReport,
    TaskSpec,
    VARIANTS,
    build_report,
    run_t1,
    run_t2,
    run_t3,
    run_t4,
    run_t5,
    run_t6,
)

USAGE_ERROR = 1
DATA_ERROR = 2
PROVIDER_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def default_config() -> dict:
    return {
        "builder": BuilderConfig().to_dict(),
        "encoder": {
            "kind": "reference",
            "dim": 768,
            "tokenizer_id": "reference",
            "window": 512,
            "overlap": 256,
            "seed": 0,
            "endpoint": None,
        },
        "hyperparams": Hyperparams().to_dict(),
    }


def _load_config(path: str | None) -> dict:
    cfg = default_config()
    if path:
        user = files.read_json(path)
        for section in ("builder", "encoder", "hyperparams"):
            if section in user:
                cfg[section].update(user[section])
    return cfg


def _manifest(data_dir: Path) -> dict:
    return files.read_json(data_dir / "manifest.json")


def _encoder_from(cfg: dict, args) -> EncoderHandle:
    enc_cfg = dict(cfg["encoder"])
    if getattr(args, "encoder", None):
        enc_cfg["kind"] = args.encoder
    if getattr(args, "endpoint", None):
        enc_cfg["endpoint"] = args.endpoint
        if enc_cfg["kind"] == "reference":
            enc_cfg["kind"] = "provider"
    if getattr(args, "model", None):
        enc_cfg["tokenizer_id"] = args.model
    if getattr(args, "dim", None):
        enc_cfg["dim"] = args.dim
    return EncoderHandle(
        kind=enc_cfg["kind"],
        dim=enc_cfg["dim"],
        tokenizer_id=enc_cfg["tokenizer_id"],
        window=enc_cfg["window"],
        overlap=enc_cfg["overlap"],
        seed=enc_cfg["seed"],
        endpoint=enc_cfg.get("endpoint"),
    )


# --- subcommands ---------------------------------------------------------------


def cmd_generate(args) -> int:
    cfg = _load_config(args.config)
    builder = BuilderConfig.from_dict(cfg["builder"])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = generate_synthetic(builder)
    n = files.write_wkt_lines(records, out / "geometries.wkt")
    counts = {}
    for rec in records:
        counts[rec.geometry.kind] = counts.get(rec.geometry.kind, 0) + 1
    manifest = {
        "config": cfg,
        "record_counts": counts,
        "records_total": n,
        "seed": builder.seed,
    }
    files.write_json(manifest, out / "manifest.json")
    print(f"generated {n} records into {out}")
    return 0


def cmd_truth(args) -> int:
    data_dir = Path(args.in_dir)
    manifest = _manifest(data_dir)
    builder = BuilderConfig.from_dict(manifest["config"]["builder"])
    records = files.load_wkt_lines(data_dir / "geometries.wkt")

    attrs = build_attribute_table(records)
    with open(data_dir / "attributes.tsv", "w", encoding="utf-8") as fh:
        for a in attrs:
            fh.write(f"{a.id}\t{a.geom_type}\t{a.area!r}\t{a.centroid.x!r}\t{a.centroid.y!r}\n")

    tb = build_relation_triplets(records, builder)
    files.write_relation_table(tb.triplets, data_dir / "relations.tsv")
    qb = build_location_queries(records, builder)
    files.write_jsonl(
        (
            {"object_id": q.object_id, "predicate": q.predicate, "answers": list(q.answers)}
            for q in qb.queries
        ),
        data_dir / "queries.jsonl",
    )

    datasets = build_task_datasets(records, attrs, tb.triplets, qb.queries, builder)
    tasks_dir = data_dir / "tasks"
    tasks_dir.mkdir(exist_ok=True)
    for task_id, ds in sorted(datasets.items()):
        rows = [
            {"ids": list(ex.ids), "target": ex.target, "split": ex.split}
            for ex in ds.examples
        ]
        files.write_jsonl(rows, tasks_dir / f"{task_id.lower()}.jsonl")

    files.write_json(
        {
            "triplet_category_counts": tb.category_counts,
            "triplet_shortfalls": tb.shortfalls,
            "triplets_dropped_fallback": tb.dropped_fallback,
            "query_category_counts": qb.category_counts,
            "query_shortfalls": qb.shortfalls,
        },
        data_dir / "truth_meta.json",
    )
    print(
        f"truth tables: {len(attrs)} attributes, {len(tb.triplets)} triplets, "
        f"{len(qb.queries)} queries"
    )
    return 0


def cmd_encode(args) -> int:
    data_dir = Path(args.in_dir)
    manifest = _manifest(data_dir)
    enc = _encoder_from(manifest["config"], args)
    records = files.load_wkt_lines(data_dir / "geometries.wkt")

    keys = [rec.id for rec in records]
    texts = [format_wkt(rec.geometry) for rec in records]
    queries_path = data_dir / "queries.jsonl"
    if queries_path.exists():
        by_id = {rec.id: rec for rec in records}
        for row in files.read_jsonl(queries_path):
            phrase = RelationPhrase(row["predicate"], format_wkt(by_id[row["object_id"]].geometry))
            keys.append(phrase_cache_id(row["predicate"], row["object_id"]))
            texts.append(phrase.text)

    vecs = embed_texts(enc, texts, batch=args.batch)
    cache = {k: v for k, v in zip(keys, vecs)}
    n = write_cache(cache, args.cache)
    print(f"encoded {n} texts with {enc.encoder_id} into {args.cache}")
    return 0


def _load_task_dataset(data_dir: Path, task_id: str) -> TaskDataset:
    path = data_dir / "tasks" / f"{task_id.lower()}.jsonl"
    ds = TaskDataset(task_id)
    for row in files.read_jsonl(path):
        ds.examples.append(TaskExample(tuple(row["ids"]), row["target"], row["split"]))
    return ds


def _vectors_for(args, data_dir: Path, manifest: dict, needed_texts):
    """Vector lookup: from a cache file when given, else computed on the fly."""
    if args.cache:
        return read_cache(args.cache)
    enc = _encoder_from(manifest["config"], args)
    keys = [k for k, _ in needed_texts]
    vecs = embed_texts(enc, [t for _, t in needed_texts])
    return {k: v for k, v in zip(keys, vecs)}


def cmd_run(args) -> int:
    data_dir = Path(args.in_dir)
    manifest = _manifest(data_dir)
    task_id = args.task.upper()
    if task_id not in VARIANTS:
        print(f"error: unknown task {args.task!r}", file=sys.stderr)
        return USAGE_ERROR
    variant = args.variant or VARIANTS[task_id][0]
    TaskSpec(task_id, variant, k=args.k)

    hp_cfg = dict(manifest["config"]["hyperparams"])
    if args.seed is not None:
        hp_cfg["seed"] = args.seed
    hp = Hyperparams.from_dict(hp_cfg)

    records = files.load_wkt_lines(data_dir / "geometries.wkt")
    kinds = {rec.id: rec.geometry.kind for rec in records}
    by_id = {rec.id: rec for rec in records}

    enc_for_id = _encoder_from(manifest["config"], args)
    encoder_id = enc_for_id.encoder_id

    if task_id == "T6":
        rows = files.read_jsonl(data_dir / "queries.jsonl")
        queries = [LocationQuery(r["object_id"], r["predicate"], tuple(r["answers"])) for r in rows]
        needed = []
        subject_ids = sorted({sid for q in queries for sid in q.answers})
        for sid in subject_ids:
            needed.append((sid, format_wkt(by_id[sid].geometry)))
        for q in queries:
            phrase = RelationPhrase(q.predicate, format_wkt(by_id[q.object_id].geometry))
            needed.append((phrase_cache_id(q.predicate, q.object_id), phrase.text))
        vectors = _vectors_for(args, data_dir, manifest, needed)
        report = run_t6(queries, vectors, vectors, k=args.k, encoder_id=encoder_id)
    else:
        ds = _load_task_dataset(data_dir, task_id)
        needed_ids = sorted({rid for ex in ds.examples for rid in ex.ids})
        needed = [(rid, format_wkt(by_id[rid].geometry)) for rid in needed_ids]
        vectors = _vectors_for(args, data_dir, manifest, needed)
        if task_id == "T1":
            report = run_t1(ds, vectors, hp, encoder_id)
        elif task_id == "T2":
            report = run_t2(ds, vectors, kinds, hp, variant, encoder_id)
        elif task_id == "T3":
            report = run_t3(ds, vectors, hp, encoder_id)
        elif task_id == "T4":
            report = run_t4(ds, vectors, kinds, hp, variant, encoder_id)
        else:
            report = run_t5(ds, vectors, hp, variant, encoder_id)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"{task_id.lower()}_{variant}_{encoder_id}.json"
    files.write_json(report.to_dict(), out_path)
    val = "N/A" if report.validation is None else f"{report.validation:.6g}"
    print(f"{task_id} {variant} [{encoder_id}] {report.metric_name}: val={val} test={report.test:.6g}")
    return 0


def cmd_report(args) -> int:
    report_dir = Path(args.in_dir)
    paths = sorted(p for p in report_dir.glob("*.json") if p.name != "results.json")
    if not paths:
        print(f"error: no report files in {report_dir}", file=sys.stderr)
        return DATA_ERROR
    reports = [MetricsReport.from_dict(files.read_json(p)) for p in paths]
    rows, table = build_report(reports)
    files.write_json(rows, report_dir / "results.json")
    with open(report_dir / "table.txt", "w", encoding="utf-8") as fh:
        fh.write(table)
    print(table, end="")
    return 0


def main(argv=None) -> int:
    parser = _Parser(prog="wktprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic geometry corpus")
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--out", required=True, help="output data directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("truth", help="compute ground-truth tables and task datasets")
    p.add_argument("--in", dest="in_dir", required=True, help="data directory")
    p.set_defaults(func=cmd_truth)

    p = sub.add_parser("encode", help="embed all WKTs and relation phrases into a cache")
    p.add_argument("--encoder", choices=("reference", "provider"))
    p.add_argument("--endpoint", help="provider URL")
    p.add_argument("--model", help="provider model id")
    p.add_argument("--dim", type=int)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--cache", required=True, help="embedding cache file to write")
    p.add_argument("--batch", type=int, default=64)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("run", help="run one evaluation task")
    p.add_argument("--task", required=True, help="t1..t6")
    p.add_argument("--variant")
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True, help="report directory")
    p.add_argument("--encoder", choices=("reference", "provider"))
    p.add_argument("--endpoint")
    p.add_argument("--model")
    p.add_argument("--dim", type=int)
    p.add_argument("--cache", help="embedding cache file to read")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="merge task reports into a comparison table")
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_report)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        return args.func(args)
    except ProviderError as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return PROVIDER_ERROR
    except (ProbeError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
