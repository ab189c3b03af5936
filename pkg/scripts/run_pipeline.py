#!/usr/bin/env python3
"""Run the whole evaluation pipeline with the deterministic reference encoder.

Example:
    python scripts/run_pipeline.py --out /tmp/probe_run --samples 400 --seed 7
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

RUNS = [
    ("t1", None),
    ("t2", None),
    ("t2", "polygon_only"),
    ("t3", None),
    ("t4", "without_geometry_type"),
    ("t4", "with_geometry_type"),
    ("t5", "disjoint_only"),
    ("t6", None),
]


def sh(argv):
    print("+", " ".join(argv))
    subprocess.run(argv, check=True)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="working directory")
    ap.add_argument("--samples", type=int, default=400, help="samples per geometry type")
    ap.add_argument("--quota", type=int, default=40, help="triplet quota per category")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--epochs", type=int, default=100)
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = {
        "builder": {
            "samples_per_type": args.samples,
            "triplet_quota": args.quota,
            "location_objects": max(5, args.quota // 2),
            "seed": args.seed,
        },
        "hyperparams": {"max_epochs": args.epochs, "seed": args.seed},
    }
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(cfg, indent=2))

    data = out / "data"
    reports = out / "reports"
    cache = data / "reference.cache"
    cli = [sys.executable, "-m", "wktprobe"]
    sh(cli + ["generate", "--config", str(cfg_path), "--out", str(data)])
    sh(cli + ["truth", "--in", str(data)])
    sh(cli + ["encode", "--encoder", "reference", "--in", str(data), "--cache", str(cache)])
    for task, variant in RUNS:
        argv = cli + [
            "run", "--task", task, "--in", str(data), "--out", str(reports),
            "--cache", str(cache), "--seed", str(args.seed),
        ]
        if variant:
            argv += ["--variant", variant]
        sh(argv)
    sh(cli + ["report", "--in", str(reports)])
    print(f"\nreports in {reports}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
