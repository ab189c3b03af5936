"""Text encoders: tokenization, sliding-window segmentation, mean pooling.

Two encoder kinds share one handle type. The reference encoder is a fully
deterministic, LLM-free stand-in (hash-seeded unit token vectors plus a
small sinusoidal position term) that lets the whole pipeline run and be
tested offline. The provider kind talks to an external embedding service
over a small JSON protocol:

    POST /embed  {"model": str, "window": int, "overlap": int, "texts": [str, ...]}
      -> {"dim": int, "embeddings": [[float, ...], ...]}   (request order)
    errors: non-2xx with {"error": str}

Embedding cache files hold one record per line:
"<id>\\t<base64 of little-endian 32-bit float array>".
"""

from __future__ import annotations

import base64
import hashlib
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from .errors import (
    DataFormatError,
    DimensionMismatchError,
    EmptyInputError,
    ProviderError,
)
from .geometry import Geometry, format_wkt
from .relate import DISJOINT_BUT_NEAR, PREDICATE_NAMES

POSITION_MIX_WEIGHT = 0.1


@dataclass
class EncoderHandle:
    """Configuration and per-run cache for one encoder."""

    kind: str = "reference"  # "reference" | "provider"
    dim: int = 768
    tokenizer_id: str = "reference"
    window: int = 512
    overlap: int = 256
    seed: int = 0
    endpoint: str | None = None
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    _token_vecs: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("reference", "provider"):
            raise ValueError(f"unknown encoder kind {self.kind!r}")
        if not (0 < self.overlap < self.window):
            raise ValueError("need 0 < overlap < window")
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.kind == "provider" and not self.endpoint:
            raise ValueError("provider encoder needs an endpoint")

    @property
    def encoder_id(self) -> str:
        if self.kind == "reference":
            return f"reference-d{self.dim}-s{self.seed}-w{self.window}o{self.overlap}"
        return f"{self.tokenizer_id}-w{self.window}o{self.overlap}"


@dataclass(frozen=True)
class RelationPhrase:
    """A predicate plus an object WKT, rendered as '<predicate> <wkt>'."""

    predicate: str
    wkt: str

    def __post_init__(self):
        if self.predicate not in PREDICATE_NAMES and self.predicate != DISJOINT_BUT_NEAR:
            raise ValueError(f"unknown predicate {self.predicate!r}")

    @property
    def text(self) -> str:
        pred = "disjoint but near" if self.predicate == DISJOINT_BUT_NEAR else self.predicate
        return f"{pred} {self.wkt}"

    @classmethod
    def from_text(cls, text: str) -> "RelationPhrase":
        if text.startswith("disjoint but near "):
            return cls(DISJOINT_BUT_NEAR, text[len("disjoint but near ") :])
        head, _, rest = text.partition(" ")
        if head not in PREDICATE_NAMES:
            raise DataFormatError(f"phrase does not start with a predicate: {text[:40]!r}")
        return cls(head, rest)


_TOKEN_RE = re.compile(r"[A-Za-z]+|[0-9.\-]+|\S")


def tokenize_reference(text: str) -> list[str]:
    """Maximal runs of letters, of digits/'.'/'-', or single punctuation;
    whitespace dropped."""
    return _TOKEN_RE.findall(text)


def window_segments(tokens: list, window: int, overlap: int) -> list[list]:
    """Overlapping segments starting at offsets 0, W-O, 2(W-O), ...

    Every token lands in at least one segment; a sequence no longer than
    the window yields exactly one segment.
    """
    if not (0 < overlap < window):
        raise ValueError("need 0 < overlap < window")
    if len(tokens) <= window:
        return [list(tokens)]
    stride = window - overlap
    segments = []
    offset = 0
    while True:
        segments.append(list(tokens[offset : offset + window]))
        if offset + window >= len(tokens):
            break
        offset += stride
    return segments


def _unit_token_vector(token: str, seed: int, dim: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}\x00{token}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


_PE_CACHE: dict[int, np.ndarray] = {}


def _position_table(dim: int, length: int) -> np.ndarray:
    """Sinusoidal position rows, each normalized to unit length."""
    table = _PE_CACHE.get(dim)
    if table is None or table.shape[0] < length:
        size = max(length, 64)
        pos = np.arange(size)[:, None]
        i = np.arange(dim)[None, :]
        angles = pos / np.power(10000.0, (2 * (i // 2)) / dim)
        table = np.where(i % 2 == 0, np.sin(angles), np.cos(angles))
        table = table / np.linalg.norm(table, axis=1, keepdims=True)
        _PE_CACHE[dim] = table
    return table[:length]


def reference_token_vectors(seed: int, dim: int, tokens: list[str]) -> np.ndarray:
    """One vector per token: a unit pseudo-random vector keyed by the token
    text and seed, with a small sinusoidal position term mixed in
    multiplicatively (so mean pooling stays order-sensitive)."""
    if dim <= 0:
        raise ValueError("dim must be positive")
    out = np.empty((len(tokens), dim), dtype=np.float64)
    for i, tok in enumerate(tokens):
        out[i] = _unit_token_vector(tok, seed, dim)
    pe = _position_table(dim, len(tokens))
    return out + POSITION_MIX_WEIGHT * (pe * out)


def _reference_embed(enc: EncoderHandle, text: str) -> np.ndarray:
    tokens = tokenize_reference(text)
    if not tokens:
        raise EmptyInputError("no tokens to embed")
    total = np.zeros(enc.dim, dtype=np.float64)
    count = 0
    for segment in window_segments(tokens, enc.window, enc.overlap):
        for tok in segment:
            if tok not in enc._token_vecs:
                enc._token_vecs[tok] = _unit_token_vector(tok, enc.seed, enc.dim)
        base = np.stack([enc._token_vecs[t] for t in segment])
        pe = _position_table(enc.dim, len(segment))
        vecs = base + POSITION_MIX_WEIGHT * (pe * base)
        total += vecs.sum(axis=0)
        count += len(segment)
    return (total / count).astype(np.float32)


def _provider_embed_batch(enc: EncoderHandle, texts: list[str]) -> np.ndarray:
    body = {
        "model": enc.tokenizer_id,
        "window": enc.window,
        "overlap": enc.overlap,
        "texts": texts,
    }
    try:
        resp = requests.post(f"{enc.endpoint.rstrip('/')}/embed", json=body, timeout=600)
    except requests.RequestException as exc:
        raise ProviderError(f"provider unreachable: {exc}") from exc
    if resp.status_code < 200 or resp.status_code >= 300:
        detail = ""
        try:
            detail = resp.json().get("error", "")
        except Exception:
            detail = resp.text[:200]
        raise ProviderError(f"provider returned {resp.status_code}: {detail}")
    try:
        payload = resp.json()
        dim = int(payload["dim"])
        arr = np.asarray(payload["embeddings"], dtype=np.float32)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProviderError(f"invalid provider reply: {exc}") from exc
    if arr.ndim != 2 or arr.shape != (len(texts), dim):
        raise ProviderError(f"provider reply shape {arr.shape} does not match request")
    if dim != enc.dim:
        raise ProviderError(f"provider dim {dim} != configured dim {enc.dim}")
    if not np.all(np.isfinite(arr)):
        raise ProviderError("provider reply contains non-finite values")
    return arr


def embed_text(enc: EncoderHandle, text: str) -> np.ndarray:
    """Mean of per-token vectors over all sliding-window segments (tokens in
    overlaps counted once per containing segment)."""
    if not text or not text.strip():
        raise EmptyInputError("cannot embed empty text")
    if enc.kind == "reference":
        return _reference_embed(enc, text)
    return _provider_embed_batch(enc, [text])[0]


def embed_texts(enc: EncoderHandle, texts: list[str], batch: int = 64) -> np.ndarray:
    """Vectorized embed_text; provider requests are chunked."""
    if enc.kind == "reference":
        return np.stack([embed_text(enc, t) for t in texts]) if texts else np.empty((0, enc.dim), np.float32)
    out = []
    for i in range(0, len(texts), batch):
        out.append(_provider_embed_batch(enc, texts[i : i + batch]))
    return np.concatenate(out) if out else np.empty((0, enc.dim), np.float32)


def encode_geometry(enc: EncoderHandle, g: Geometry, geom_id: str | None = None) -> np.ndarray:
    """Embedding of the geometry's WKT, cached by (encoder id, geometry id)."""
    if geom_id is not None:
        hit = enc._cache.get(geom_id)
        if hit is not None:
            return hit
    vec = embed_text(enc, format_wkt(g))
    if geom_id is not None:
        enc._cache[geom_id] = vec
    return vec


def encode_relation_phrase(enc: EncoderHandle, phrase: RelationPhrase, phrase_id: str | None = None) -> np.ndarray:
    """Embedding of the rendered '<predicate> <wkt>' phrase."""
    if phrase_id is not None:
        hit = enc._cache.get(phrase_id)
        if hit is not None:
            return hit
    vec = embed_text(enc, phrase.text)
    if phrase_id is not None:
        enc._cache[phrase_id] = vec
    return vec


def concat(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Concatenation [a;b]; order is (subject, object) everywhere."""
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot concat dims {a.shape} and {b.shape}")
    return np.concatenate([a, b])


def phrase_cache_id(predicate: str, object_id: str) -> str:
    return f"rel:{predicate}:{object_id}"


# --- cache file ---------------------------------------------------------------


def write_cache(vectors: dict[str, np.ndarray], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for key in vectors:
            raw = np.asarray(vectors[key], dtype="<f4").tobytes()
            fh.write(f"{key}\t{base64.b64encode(raw).decode('ascii')}\n")
            n += 1
    return n


def read_cache(path: str | Path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, b64 = line.partition("\t")
            if not b64:
                raise DataFormatError(f"{path}:{lineno}: expected '<id>\\t<base64>'")
            try:
                raw = base64.b64decode(b64, validate=True)
            except Exception as exc:
                raise DataFormatError(f"{path}:{lineno}: bad base64: {exc}") from exc
            out[key] = np.frombuffer(raw, dtype="<f4").copy()
    return out
