"""Build local gpt2-class / bert-class checkpoints.

Pretrained weights are not always available offline, so this constructs a
servable checkpoint directory from scratch: the real GPT-2 / BERT
architecture at hidden size 768 (reduced layer count, seeded
initialization) plus a subword tokenizer trained on a synthetic WKT
corpus. An optional language-modeling pretraining pass over that corpus
(causal LM for gpt2-class, masked LM for bert-class) gives the token
embeddings the locality structure that real pretrained checkpoints carry.
The resulting directory loads with AutoModel/AutoTokenizer like any other
checkpoint; point --model-dir at a real pretrained snapshot to serve that
instead.
"""

from __future__ import annotations

import random
from pathlib import Path

import torch
from tokenizers import Tokenizer
from tokenizers.models import BPE, WordPiece
from tokenizers.pre_tokenizers import ByteLevel, BertPreTokenizer
from tokenizers.decoders import ByteLevel as ByteLevelDecoder
from tokenizers.trainers import BpeTrainer, WordPieceTrainer
from transformers import (
    BertConfig,
    BertForMaskedLM,
    BertTokenizerFast,
    GPT2Config,
    GPT2LMHeadModel,
    GPT2TokenizerFast,
)

PRETRAIN_SEQ_LEN = 64
PRETRAIN_BATCH = 4
PRETRAIN_LR = 1e-3

PREDICATES = (
    "equals",
    "disjoint",
    "intersects",
    "crosses",
    "touches",
    "contains",
    "within",
    "overlaps",
    "disjoint but near",
)


def wkt_corpus(n_lines: int = 4000, seed: int = 0) -> list[str]:
    """Synthetic WKT and relation-phrase lines for tokenizer training."""
    rng = random.Random(seed)

    def coord() -> str:
        x = rng.uniform(-89.6, -89.2)
        y = rng.uniform(42.9, 43.2)
        return f"{x:.{rng.randint(4, 7)}f} {y:.{rng.randint(4, 7)}f}"

    lines = []
    for i in range(n_lines):
        kind = i % 3
        if kind == 0:
            wkt = f"POINT ({coord()})"
        elif kind == 1:
            pts = ", ".join(coord() for _ in range(rng.randint(2, 12)))
            wkt = f"LINESTRING ({pts})"
        else:
            first = coord()
            pts = ", ".join([first] + [coord() for _ in range(rng.randint(3, 10))] + [first])
            wkt = f"POLYGON (({pts}))"
        if rng.random() < 0.3:
            wkt = f"{rng.choice(PREDICATES)} {wkt}"
        lines.append(wkt)
    return lines


def _token_stream(tokenizer, corpus: list[str]) -> torch.Tensor:
    sep = tokenizer.eos_token_id
    if sep is None:
        sep = tokenizer.sep_token_id if tokenizer.sep_token_id is not None else 0
    ids: list[int] = []
    for line in corpus:
        ids.extend(tokenizer.encode(line, add_special_tokens=False))
        ids.append(sep)
    return torch.tensor(ids, dtype=torch.long)


def _pretrain(lm, tokenizer, corpus: list[str], steps: int, seed: int, masked: bool) -> None:
    """Seeded LM pretraining over the corpus: causal next-token prediction,
    or 15% masked-token prediction for bert-class."""
    ids = _token_stream(tokenizer, corpus)
    n_chunks = len(ids) // PRETRAIN_SEQ_LEN
    chunks = ids[: n_chunks * PRETRAIN_SEQ_LEN].view(n_chunks, PRETRAIN_SEQ_LEN)
    lm.train()
    opt = torch.optim.AdamW(lm.parameters(), lr=PRETRAIN_LR)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=steps)
    gen = torch.Generator().manual_seed(seed + 1)
    mask_id = tokenizer.mask_token_id
    for _ in range(steps):
        sel = torch.randint(0, n_chunks, (PRETRAIN_BATCH,), generator=gen)
        batch = chunks[sel]
        if masked:
            labels = batch.clone()
            roll = torch.rand(batch.shape, generator=gen)
            masked_pos = roll < 0.15
            labels[~masked_pos] = -100
            inputs = batch.clone()
            inputs[masked_pos & (roll < 0.12)] = mask_id
            out = lm(input_ids=inputs, labels=labels)
        else:
            out = lm(input_ids=batch, labels=batch)
        if out.loss is not None and torch.isfinite(out.loss):
            out.loss.backward()
            opt.step()
        sched.step()
        opt.zero_grad()
    lm.eval()


def build_gpt2_class(
    out_dir: str | Path,
    layers: int = 2,
    vocab_size: int = 1000,
    seed: int = 0,
    pretrain_steps: int = 0,
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tok = Tokenizer(BPE(unk_token=None))
    tok.pre_tokenizer = ByteLevel(add_prefix_space=False)
    tok.decoder = ByteLevelDecoder()
    trainer = BpeTrainer(
        vocab_size=vocab_size,
        special_tokens=["<|endoftext|>"],
        initial_alphabet=ByteLevel.alphabet(),
        show_progress=False,
    )
    corpus = wkt_corpus(seed=seed)
    tok.train_from_iterator(corpus, trainer)
    fast = GPT2TokenizerFast(
        tokenizer_object=tok,
        bos_token="<|endoftext|>",
        eos_token="<|endoftext|>",
        unk_token="<|endoftext|>",
    )
    fast.save_pretrained(out)

    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=fast.vocab_size,
        n_positions=1024,
        n_embd=768,
        n_layer=layers,
        n_head=12,
        bos_token_id=fast.bos_token_id,
        eos_token_id=fast.eos_token_id,
    )
    lm = GPT2LMHeadModel(config)
    if pretrain_steps:
        _pretrain(lm, fast, wkt_corpus(12000, seed=seed), pretrain_steps, seed, masked=False)
    lm.save_pretrained(out)
    return out


def build_bert_class(
    out_dir: str | Path,
    layers: int = 2,
    vocab_size: int = 1000,
    seed: int = 0,
    pretrain_steps: int = 0,
) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tok = Tokenizer(WordPiece(unk_token="[UNK]"))
    tok.pre_tokenizer = BertPreTokenizer()
    trainer = WordPieceTrainer(
        vocab_size=vocab_size,
        special_tokens=["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"],
        show_progress=False,
    )
    corpus = wkt_corpus(seed=seed)
    tok.train_from_iterator(corpus, trainer)
    fast = BertTokenizerFast(
        tokenizer_object=tok,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )
    fast.save_pretrained(out)

    torch.manual_seed(seed)
    config = BertConfig(
        vocab_size=fast.vocab_size,
        hidden_size=768,
        num_hidden_layers=layers,
        num_attention_heads=12,
        intermediate_size=3072,
        max_position_embeddings=512,
        pad_token_id=fast.pad_token_id,
    )
    lm = BertForMaskedLM(config)
    if pretrain_steps:
        _pretrain(lm, fast, wkt_corpus(12000, seed=seed), pretrain_steps, seed, masked=True)
    lm.save_pretrained(out)
    return out


def build(
    arch: str,
    out_dir: str | Path,
    layers: int = 2,
    vocab_size: int = 1000,
    seed: int = 0,
    pretrain_steps: int = 0,
) -> Path:
    if arch == "gpt2-class":
        return build_gpt2_class(out_dir, layers, vocab_size, seed, pretrain_steps)
    if arch == "bert-class":
        return build_bert_class(out_dir, layers, vocab_size, seed, pretrain_steps)
    raise ValueError(f"unknown architecture {arch!r} (expected gpt2-class or bert-class)")
