"""HTTP service for the embedding wire protocol.

POST /embed  {"model": str, "window": int, "overlap": int, "texts": [str, ...]}
  -> {"dim": int, "embeddings": [[float, ...], ...]}   (request order)
GET /health  -> model id, dim, windowing and pooling metadata.

Errors: 400 malformed request, 413 batch too large, 500 model failure;
all error bodies are {"error": str}. Inference is serialized through a
lock (single model instance).
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .model import EmbeddingEngine


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(engine: EmbeddingEngine) -> FastAPI:
    app = FastAPI(title="wktembed provider")
    lock = threading.Lock()

    @app.get("/health")
    def health():
        return engine.health()

    @app.post("/embed")
    async def embed(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _error(400, "body is not valid JSON")
        if not isinstance(body, dict):
            return _error(400, "body must be a JSON object")
        for key in ("model", "window", "overlap", "texts"):
            if key not in body:
                return _error(400, f"missing field {key!r}")
        if body["model"] != engine.model_id:
            return _error(400, f"model {body['model']!r} not served (loaded: {engine.model_id})")
        if body["window"] != engine.cfg.window or body["overlap"] != engine.cfg.overlap:
            return _error(
                400,
                f"window/overlap {body['window']}/{body['overlap']} do not match "
                f"the served configuration {engine.cfg.window}/{engine.cfg.overlap}",
            )
        texts = body["texts"]
        if not isinstance(texts, list) or not all(isinstance(t, str) for t in texts):
            return _error(400, "texts must be a list of strings")
        if any(not t.strip() for t in texts):
            return _error(400, "texts must be non-empty")
        if len(texts) > engine.cfg.batch_cap:
            return _error(413, f"batch of {len(texts)} exceeds cap {engine.cfg.batch_cap}")
        try:
            with lock:
                vectors = [engine.embed_one(t) for t in texts]
        except Exception as exc:  # model failure
            return _error(500, f"model failure: {exc}")
        return {"dim": engine.dim, "embeddings": [v.tolist() for v in vectors]}

    return app
