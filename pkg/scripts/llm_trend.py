#!/usr/bin/env python3
"""Trend experiment against a running embedding provider (gpt2/bert class).

Reproduces the published trends at reduced scale: T1 accuracy, the T4
with/without geometry-type gap, and T6 mean P@5, using provider embeddings
for everything. Requires a provider serving the /embed protocol, e.g.:

    python -m wktembed serve --model-dir <dir> --port 8790

Then:
    python scripts/llm_trend.py --endpoint http://127.0.0.1:8790 \
        --model gpt2-class --out /tmp/trend_run
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path


def sh(argv):
    print("+", " ".join(argv))
    subprocess.run(argv, check=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--endpoint", required=True)
    ap.add_argument("--model", default="gpt2-class")
    ap.add_argument("--out", required=True)
    ap.add_argument("--samples", type=int, default=400, help="10%% of the full-scale 4,000")
    ap.add_argument("--quota", type=int, default=40, help="10%% of the full-scale 400")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = {
        "builder": {
            "samples_per_type": args.samples,
            "triplet_quota": args.quota,
            "location_objects": 20,
            "seed": args.seed,
        },
        "encoder": {
            "kind": "provider",
            "tokenizer_id": args.model,
            "endpoint": args.endpoint,
        },
        "hyperparams": {"seed": args.seed},
    }
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(cfg, indent=2))

    data = out / "data"
    reports = out / "reports"
    cache = data / "provider.cache"
    cli = [sys.executable, "-m", "wktprobe"]
    sh(cli + ["generate", "--config", str(cfg_path), "--out", str(data)])
    sh(cli + ["truth", "--in", str(data)])
    sh(
        cli
        + [
            "encode", "--encoder", "provider", "--endpoint", args.endpoint,
            "--model", args.model, "--in", str(data), "--cache", str(cache),
        ]
    )
    for task, variant in [
        ("t1", None),
        ("t4", "without_geometry_type"),
        ("t4", "with_geometry_type"),
        ("t6", None),
    ]:
        argv = cli + [
            "run", "--task", task, "--in", str(data), "--out", str(reports),
            "--cache", str(cache), "--seed", str(args.seed),
            "--encoder", "provider", "--endpoint", args.endpoint, "--model", args.model,
        ]
        if variant:
            argv += ["--variant", variant]
        sh(argv)
    sh(cli + ["report", "--in", str(reports)])

    results = json.loads((reports / "results.json").read_text())
    by_key = {(r["task_id"], r["variant"]): r for r in results}
    t1 = by_key[("T1", "default")]["test"]
    t4_without = by_key[("T4", "without_geometry_type")]["test"]
    t4_with = by_key[("T4", "with_geometry_type")]["test"]
    t6 = by_key[("T6", "default")]["test"]
    print("\ntrend summary")
    print(f"  T1 test accuracy:            {t1:.1f}%  (full-scale published: 100)")
    print(f"  T4 without geometry type:    {t4_without:.1f}%")
    print(f"  T4 with geometry type:       {t4_with:.1f}%  (gap {t4_with - t4_without:+.1f}pp)")
    print(f"  T6 mean P@5:                 {t6:.3f}  (full-scale published: 0.03)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
