"""wktembed commands: build-model, serve, embed-file."""

from __future__ import annotations

import argparse
import sys

from .batch import embed_file
from .build import build
from .model import EmbeddingEngine, ProviderConfig


def _engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model-dir", required=True, help="checkpoint directory")
    p.add_argument("--window", type=int, default=512)
    p.add_argument("--overlap", type=int, default=256)
    p.add_argument("--include-special-tokens", action="store_true")
    p.add_argument("--batch-cap", type=int, default=256)


def _engine(args) -> EmbeddingEngine:
    return EmbeddingEngine(
        ProviderConfig(
            model_dir=args.model_dir,
            window=args.window,
            overlap=args.overlap,
            include_special_tokens=args.include_special_tokens,
            batch_cap=args.batch_cap,
        )
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wktembed", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-model", help="build a local gpt2-class/bert-class checkpoint")
    p.add_argument("--arch", choices=("gpt2-class", "bert-class"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--vocab-size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--pretrain-steps",
        type=int,
        default=0,
        help="language-model pretraining steps over the synthetic WKT corpus",
    )

    p = sub.add_parser("serve", help="serve POST /embed and GET /health")
    _engine_args(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8790)

    p = sub.add_parser("embed-file", help="embed a WKT-lines/phrase-lines file into a cache")
    _engine_args(p)
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", dest="out_path", required=True)

    args = parser.parse_args(argv)

    if args.command == "build-model":
        out = build(
            args.arch, args.out, args.layers, args.vocab_size, args.seed, args.pretrain_steps
        )
        print(f"built {args.arch} checkpoint in {out}")
        return 0

    engine = _engine(args)
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        print(f"serving {engine.model_id} (dim {engine.dim}) on {args.host}:{args.port}")
        uvicorn.run(create_app(engine), host=args.host, port=args.port, log_level="warning")
        return 0

    n = embed_file(args.in_path, args.out_path, engine)
    print(f"embedded {n} records into {args.out_path}")
    return n >= 0 and 0


if __name__ == "__main__":
    sys.exit(main())
