"""Embedding engine: subword tokenization, sliding-window segmentation,
and mean pooling of final-hidden-layer token states.

Long inputs are split into overlapping windows (offsets 0, W-O, 2(W-O), ...);
each segment runs through the model separately and the final embedding is
the mean over all token states of all segments. Special tokens, when the
model adds them, are excluded from the mean unless configured otherwise.
Each text is processed independently (segment batch of one), so vectors do
not depend on how requests are batched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer


@dataclass(frozen=True)
class ProviderConfig:
    model_dir: str
    window: int = 512
    overlap: int = 256
    include_special_tokens: bool = False
    batch_cap: int = 256

    def __post_init__(self):
        if not (0 < self.overlap < self.window):
            raise ValueError("need 0 < overlap < window")
        if self.batch_cap <= 0:
            raise ValueError("batch_cap must be positive")


def window_offsets(n_tokens: int, window: int, overlap: int) -> list[int]:
    """Start offsets of the sliding windows covering n_tokens."""
    if n_tokens <= window:
        return [0]
    stride = window - overlap
    offsets = [0]
    while offsets[-1] + window < n_tokens:
        offsets.append(offsets[-1] + stride)
    return offsets


class EmbeddingEngine:
    """A loaded checkpoint plus the windowing/pooling procedure."""

    def __init__(self, cfg: ProviderConfig):
        self.cfg = cfg
        self.tokenizer = AutoTokenizer.from_pretrained(cfg.model_dir)
        self.model = AutoModel.from_pretrained(cfg.model_dir)
        self.model.eval()
        self.model_type = self.model.config.model_type  # "gpt2" | "bert" | ...
        self.model_id = f"{self.model_type}-class"
        self.dim = int(self.model.config.hidden_size)
        self.max_length = int(
            getattr(
                self.model.config,
                "max_position_embeddings",
                getattr(self.model.config, "n_positions", cfg.window),
            )
        )
        if cfg.window > self.max_length:
            raise ValueError(
                f"window {cfg.window} exceeds model max sequence length {self.max_length}"
            )
        # The special-token frame the tokenizer puts around a sequence,
        # derived from an encode probe (API-stable across versions).
        probe_plain = self.tokenizer.encode("probe", add_special_tokens=False)
        probe_framed = self.tokenizer.encode("probe", add_special_tokens=True)
        self._prefix: list[int] = []
        self._suffix: list[int] = []
        for start in range(len(probe_framed) - len(probe_plain) + 1):
            if probe_framed[start : start + len(probe_plain)] == probe_plain:
                self._prefix = probe_framed[:start]
                self._suffix = probe_framed[start + len(probe_plain) :]
                break
        self._n_special = len(self._prefix) + len(self._suffix)
        # Room for special tokens within the model's position limit.
        self.content_window = min(cfg.window, self.max_length - self._n_special)
        if self.content_window <= cfg.overlap:
            raise ValueError("window minus special tokens must exceed the overlap")

    def health(self) -> dict:
        return {
            "model": self.model_id,
            "dim": self.dim,
            "window": self.cfg.window,
            "overlap": self.cfg.overlap,
            "max_length": self.max_length,
            "pooling": "mean",
            "layer": "final_hidden",
            "include_special_tokens": self.cfg.include_special_tokens,
        }

    @torch.no_grad()
    def embed_one(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise ValueError("cannot embed empty text")
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if not ids:
            raise ValueError("text tokenized to nothing")
        total = torch.zeros(self.dim, dtype=torch.float64)
        count = 0
        for off in window_offsets(len(ids), self.content_window, self.cfg.overlap):
            segment = ids[off : off + self.content_window]
            with_special = self._prefix + segment + self._suffix
            input_ids = torch.tensor([with_special], dtype=torch.long)
            states = self.model(input_ids=input_ids).last_hidden_state[0]
            if self.cfg.include_special_tokens or not self._n_special:
                chosen = states
            else:
                chosen = states[len(self._prefix) : len(self._prefix) + len(segment)]
            total += chosen.to(torch.float64).sum(dim=0)
            count += chosen.shape[0]
        return (total / count).numpy().astype(np.float32)

    def embed_batch(self, texts: list[str]) -> np.ndarray:
        return np.stack([self.embed_one(t) for t in texts])
