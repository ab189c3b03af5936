"""Offline batch embedding: text files in, embedding-cache file out.

Input is either WKT-lines ("<id>\\t<wkt>\\t<source>") or phrase-lines
("<id>\\t<text>"). The output uses the probing pipeline's cache format:
one "<id>\\t<base64 little-endian float32 array>" per line.
"""

from __future__ import annotations

import base64
from pathlib import Path

import numpy as np

from .model import EmbeddingEngine


def read_text_lines(path: str | Path) -> list[tuple[str, str]]:
    """(id, text) pairs from a WKT-lines or phrase-lines file."""
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) == 3:
                rid, text, _source = parts
            elif len(parts) == 2:
                rid, text = parts
            else:
                raise ValueError(f"{path}:{lineno}: expected 2 or 3 tab-separated fields")
            if rid in seen:
                raise ValueError(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            pairs.append((rid, text))
    return pairs


def write_cache_line(fh, rid: str, vec: np.ndarray) -> None:
    raw = np.ascontiguousarray(vec, dtype="<f4").tobytes()
    fh.write(f"{rid}\t{base64.b64encode(raw).decode('ascii')}\n")


def read_cache(path: str | Path) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            rid, _, b64 = line.partition("\t")
            out[rid] = np.frombuffer(base64.b64decode(b64), dtype="<f4").copy()
    return out


def embed_file(in_path: str | Path, out_path: str | Path, engine: EmbeddingEngine) -> int:
    """Embed every line of the input file; returns the record count."""
    pairs = read_text_lines(in_path)
    with open(out_path, "w", encoding="utf-8") as fh:
        for rid, text in pairs:
            write_cache_line(fh, rid, engine.embed_one(text))
    return len(pairs)
