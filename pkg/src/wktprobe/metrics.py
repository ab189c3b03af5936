"""Evaluation metrics: accuracy (%), MAPE (%), RMSE, Precision@k.

All metrics operate on original-scale targets. MAPE is computed only over
targets with |y| > 0; callers count the excluded rows in report metadata.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import EmptyInputError


def metric_accuracy(preds, targets) -> float:
    """100 * correct / total."""
    preds = list(preds)
    targets = list(targets)
    if not preds or len(preds) != len(targets):
        raise EmptyInputError("accuracy needs equal-length non-empty inputs")
    correct = sum(1 for p, t in zip(preds, targets) if p == t)
    return 100.0 * correct / len(preds)


def metric_mape(preds, targets) -> float:
    """100 * mean(|pred - target| / |target|) over targets with |y| > 0."""
    preds = np.asarray(preds, dtype=np.float64).ravel()
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if preds.size == 0 or preds.size != targets.size:
        raise EmptyInputError("MAPE needs equal-length non-empty inputs")
    mask = np.abs(targets) > 0.0
    if not mask.any():
        raise EmptyInputError("MAPE undefined: all targets are zero")
    return float(100.0 * np.mean(np.abs(preds[mask] - targets[mask]) / np.abs(targets[mask])))


def mape_excluded_count(targets) -> int:
    """How many rows metric_mape would drop for zero targets."""
    targets = np.asarray(targets, dtype=np.float64).ravel()
    return int(np.sum(np.abs(targets) == 0.0))


def metric_rmse(preds, targets) -> float:
    """sqrt(mean squared error); multi-dimensional targets flatten over all
    components."""
    preds = np.asarray(preds, dtype=np.float64).ravel()
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if preds.size == 0 or preds.size != targets.size:
        raise EmptyInputError("RMSE needs equal-length non-empty inputs")
    return float(math.sqrt(np.mean((preds - targets) ** 2)))


def metric_precision_at_k(retrieved, relevant, k: int) -> float:
    """|top-k of retrieved ∩ relevant| / k for a single query."""
    retrieved = list(retrieved)
    if k < 1 or k > len(retrieved):
        raise EmptyInputError(f"k={k} out of range for {len(retrieved)} retrieved items")
    rel = set(relevant)
    return sum(1 for r in retrieved[:k] if r in rel) / k
