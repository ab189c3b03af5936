"""Single-hidden-layer MLP probe with manual backprop.

Architecture: input -> dropout -> hidden (ReLU) -> output linear. Training
is mini-batch Adam with seeded shuffling and early stopping on validation
loss; everything is deterministic given the seed. Parameters live in
float32 (and checkpoint exactly); loss math follows the input dtype so
gradient checks can run in float64.

Regression uses the combined loss: MSE in transformed space plus MSE on the
original scale through the inverse transform, equal weights. Reported
metrics always use the original scale.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyInputError,
    NonFiniteLossError,
)

LOG_EPSILON = 1e-12
# float32 exp overflows just above 88; clamp the log-transform inverse there.
LOG_INVERSE_CLAMP = 80.0


@dataclass
class MLPParams:
    w1: np.ndarray  # (hidden, input)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (output, hidden)
    b2: np.ndarray  # (output,)
    dropout: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError("dropout must be in [0, 1)")
        if (
            self.w1.shape[0] != self.b1.shape[0]
            or self.w2.shape[1] != self.w1.shape[0]
            or self.w2.shape[0] != self.b2.shape[0]
        ):
            raise DimensionMismatchError("inconsistent MLP parameter shapes")

    @property
    def input_dim(self) -> int:
        return self.w1.shape[1]

    @property
    def output_dim(self) -> int:
        return self.w2.shape[0]

    def copy(self) -> "MLPParams":
        return MLPParams(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy(), self.dropout)


@dataclass(frozen=True)
class Hyperparams:
    hidden_dim: int = 256
    dropout: float = 0.1
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if min(self.hidden_dim, self.batch_size, self.max_epochs, self.patience) <= 0:
            raise ConfigError("hyperparameters must be positive")
        if self.learning_rate <= 0:
            raise ConfigError("learning rate must be positive")
        if not (0.0 <= self.dropout < 1.0):
            raise ConfigError("dropout must be in [0, 1)")
        if self.patience > self.max_epochs:
            raise ConfigError("patience must not exceed max_epochs")

    def to_dict(self) -> dict:
        return {
            "hidden_dim": self.hidden_dim,
            "dropout": self.dropout,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        return cls(**d)


# --- target transforms --------------------------------------------------------


@dataclass
class TargetTransform:
    """identity, log (ln(y + eps)) or minmax fitted on the training split."""

    kind: str = "identity"
    epsilon: float = LOG_EPSILON
    mins: np.ndarray | None = None
    maxs: np.ndarray | None = None
    overflow_clamped: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.kind not in ("identity", "log", "minmax"):
            raise ConfigError(f"unknown transform {self.kind!r}")

    @classmethod
    def fit_minmax(cls, train_targets) -> "TargetTransform":
        arr = np.asarray(train_targets, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        mins = arr.min(axis=0)
        maxs = arr.max(axis=0)
        if np.any(maxs <= mins):
            raise ConfigError("minmax transform needs max > min per dimension")
        return cls("minmax", mins=mins, maxs=maxs)

    def forward(self, y):
        y = np.asarray(y, dtype=np.float64)
        if self.kind == "identity":
            return y.copy()
        if self.kind == "log":
            return np.log(y + self.epsilon)
        return (y - self.mins) / (self.maxs - self.mins)

    def inverse(self, t):
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "identity":
            return t.copy()
        if self.kind == "log":
            clipped = np.minimum(t, LOG_INVERSE_CLAMP)
            self.overflow_clamped += int(np.sum(t > LOG_INVERSE_CLAMP))
            return np.exp(clipped) - self.epsilon
        return t * (self.maxs - self.mins) + self.mins

    def inverse_grad(self, t):
        """d inverse / d t, elementwise (zero beyond the log clamp)."""
        t = np.asarray(t, dtype=np.float64)
        if self.kind == "identity":
            return np.ones_like(t)
        if self.kind == "log":
            return np.where(t > LOG_INVERSE_CLAMP, 0.0, np.exp(np.minimum(t, LOG_INVERSE_CLAMP)))
        return np.broadcast_to(self.maxs - self.mins, t.shape).copy()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "epsilon": self.epsilon,
            "mins": None if self.mins is None else list(map(float, self.mins)),
            "maxs": None if self.maxs is None else list(map(float, self.maxs)),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TargetTransform":
        mins = None if d.get("mins") is None else np.asarray(d["mins"], dtype=np.float64)
        maxs = None if d.get("maxs") is None else np.asarray(d["maxs"], dtype=np.float64)
        return cls(d["kind"], d.get("epsilon", LOG_EPSILON), mins, maxs)


# --- forward / backward ---------------------------------------------------------


def init_params(in_dim: int, hidden_dim: int, out_dim: int, dropout: float, seed: int) -> MLPParams:
    rng = np.random.default_rng([seed, 10])
    w1 = (rng.standard_normal((hidden_dim, in_dim)) * np.sqrt(2.0 / in_dim)).astype(np.float32)
    w2 = (rng.standard_normal((out_dim, hidden_dim)) * np.sqrt(2.0 / hidden_dim)).astype(np.float32)
    return MLPParams(w1, np.zeros(hidden_dim, np.float32), w2, np.zeros(out_dim, np.float32), dropout)


def _forward(p: MLPParams, x: np.ndarray, train_mode: bool, rng: np.random.Generator | None):
    """Batched forward pass; returns (out, cache) with cache for backprop."""
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != p.input_dim:
        raise DimensionMismatchError(f"input dim {x.shape[1]} != {p.input_dim}")
    if train_mode and p.dropout > 0.0:
        if rng is None:
            raise ConfigError("training-mode forward needs an rng for dropout")
        keep = 1.0 - p.dropout
        mask = (rng.random(x.shape) < keep).astype(x.dtype) / x.dtype.type(keep)
        xd = x * mask
    else:
        mask = None
        xd = x
    z1 = xd @ p.w1.T + p.b1
    h = np.maximum(z1, 0)
    out = h @ p.w2.T + p.b2
    return out, (x, xd, mask, z1, h)


def mlp_forward(
    p: MLPParams,
    x: np.ndarray,
    train_mode: bool = False,
    seed: int | None = None,
) -> np.ndarray:
    """out = W2 . relu(W1 . dropout(x) + b1) + b2.

    Inverted dropout is active only in train mode; eval mode is deterministic.
    Accepts a single vector or a batch.
    """
    single = np.asarray(x).ndim == 1
    rng = np.random.default_rng([seed, 11]) if (train_mode and seed is not None) else None
    out, _ = _forward(p, np.asarray(x), train_mode, rng)
    return out[0] if single else out


def _backward(p: MLPParams, cache, dout: np.ndarray):
    x, xd, mask, z1, h = cache
    dw2 = dout.T @ h
    db2 = dout.sum(axis=0)
    dh = dout @ p.w2
    dz1 = dh * (z1 > 0)
    dw1 = dz1.T @ xd
    db1 = dz1.sum(axis=0)
    return dw1, db1, dw2, db2


# --- losses ---------------------------------------------------------------------


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, classes: np.ndarray):
    """(mean loss, dloss/dlogits) for integer class targets."""
    if logits.ndim == 1:
        logits = logits[None, :]
    classes = np.asarray(classes).ravel()
    n = logits.shape[0]
    if classes.size != n:
        raise DimensionMismatchError("class count != batch size")
    probs = _softmax(logits.astype(np.float64))
    nll = -np.log(np.maximum(probs[np.arange(n), classes], 1e-300))
    grad = probs.copy()
    grad[np.arange(n), classes] -= 1.0
    grad /= n
    return float(nll.mean()), grad.astype(logits.dtype)


def loss_classification(logits: np.ndarray, classes) -> float:
    """Softmax cross-entropy, mean over the batch."""
    loss, _ = softmax_cross_entropy(np.asarray(logits), np.asarray(classes))
    return loss


def combined_regression_loss(pred_t: np.ndarray, targets: np.ndarray, transform: TargetTransform):
    """(loss, dloss/dpred_t): MSE in transformed space plus MSE on the
    original scale, equal weights, each averaged over all components."""
    pred_t = np.atleast_1d(np.asarray(pred_t))
    targets = np.atleast_1d(np.asarray(targets, dtype=np.float64))
    if pred_t.shape != targets.shape:
        raise DimensionMismatchError(f"pred shape {pred_t.shape} != target shape {targets.shape}")
    n = pred_t.size
    pred64 = pred_t.astype(np.float64)
    t_target = transform.forward(targets)
    resid_t = pred64 - t_target
    pred_orig = transform.inverse(pred64)
    resid_o = pred_orig - targets
    loss = float(np.mean(resid_t**2) + np.mean(resid_o**2))
    grad = (2.0 * resid_t + 2.0 * resid_o * transform.inverse_grad(pred64)) / n
    return loss, grad.astype(pred_t.dtype)


def loss_regression_combined(pred_t, targets, transform: TargetTransform) -> float:
    loss, _ = combined_regression_loss(np.asarray(pred_t), targets, transform)
    return loss


# --- training -------------------------------------------------------------------


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = float("inf")
    stopped_epoch: int = -1


def _batch_loss_grad(p, xb, yb, task, transform, rng):
    out, cache = _forward(p, xb, True, rng)
    if task == "classification":
        loss, dout = softmax_cross_entropy(out, yb)
    else:
        loss, dout = combined_regression_loss(out, yb, transform)
    grads = _backward(p, cache, dout)
    return loss, grads


def _eval_loss(p, x, y, task, transform):
    out, _ = _forward(p, x, False, None)
    if task == "classification":
        loss, _ = softmax_cross_entropy(out, y)
    else:
        loss, _ = combined_regression_loss(out, y, transform)
    return loss


def train(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    hp: Hyperparams,
    task: str = "classification",
    transform: TargetTransform | None = None,
    out_dim: int | None = None,
) -> tuple[MLPParams, TrainHistory]:
    """Mini-batch Adam (beta1=0.9, beta2=0.999) with seeded shuffling and
    early stopping on validation loss; returns the best-validation parameters.
    Fully deterministic given hp.seed."""
    if len(x_train) == 0 or len(x_val) == 0:
        raise EmptyInputError("training needs non-empty train and validation splits")
    x_train = np.asarray(x_train, dtype=np.float32)
    x_val = np.asarray(x_val, dtype=np.float32)
    if task == "classification":
        y_train = np.asarray(y_train, dtype=np.int64)
        y_val = np.asarray(y_val, dtype=np.int64)
        n_out = out_dim if out_dim is not None else int(max(y_train.max(), y_val.max())) + 1
        transform = None
    else:
        y_train = np.asarray(y_train, dtype=np.float64)
        y_val = np.asarray(y_val, dtype=np.float64)
        if y_train.ndim == 1:
            y_train = y_train[:, None]
        if y_val.ndim == 1:
            y_val = y_val[:, None]
        n_out = y_train.shape[1]
        if transform is None:
            transform = TargetTransform("identity")

    p = init_params(x_train.shape[1], hp.hidden_dim, n_out, hp.dropout, hp.seed)
    rng = np.random.default_rng([hp.seed, 12])

    adam_m = [np.zeros_like(a) for a in (p.w1, p.b1, p.w2, p.b2)]
    adam_v = [np.zeros_like(a) for a in (p.w1, p.b1, p.w2, p.b2)]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    step = 0

    history = TrainHistory()
    best = p.copy()
    since_best = 0
    n = len(x_train)

    for epoch in range(hp.max_epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        batches = 0
        for start in range(0, n, hp.batch_size):
            sel = order[start : start + hp.batch_size]
            loss, grads = _batch_loss_grad(p, x_train[sel], y_train[sel], task, transform, rng)
            if not np.isfinite(loss):
                raise NonFiniteLossError(
                    f"non-finite loss at epoch {epoch} step {step} (task={task})"
                )
            epoch_loss += loss
            batches += 1
            step += 1
            params = (p.w1, p.b1, p.w2, p.b2)
            with np.errstate(over="ignore", invalid="ignore"):
                for k, (arr, g) in enumerate(zip(params, grads)):
                    g32 = g.astype(np.float32)
                    adam_m[k] = beta1 * adam_m[k] + (1 - beta1) * g32
                    adam_v[k] = beta2 * adam_v[k] + (1 - beta2) * g32 * g32
                    m_hat = adam_m[k] / (1 - beta1**step)
                    v_hat = adam_v[k] / (1 - beta2**step)
                    arr -= (hp.learning_rate * m_hat / (np.sqrt(v_hat) + eps)).astype(
                        np.float32
                    )

        val_loss = _eval_loss(p, x_val, y_val, task, transform)
        if not np.isfinite(val_loss):
            raise NonFiniteLossError(f"non-finite validation loss at epoch {epoch}")
        history.train_loss.append(epoch_loss / max(batches, 1))
        history.val_loss.append(val_loss)
        if val_loss < history.best_val_loss:
            history.best_val_loss = val_loss
            history.best_epoch = epoch
            best = p.copy()
            since_best = 0
        else:
            since_best += 1
            if since_best >= hp.patience:
                break
    history.stopped_epoch = len(history.val_loss) - 1
    return best, history


# --- gradient check -------------------------------------------------------------


def grad_check(
    p: MLPParams,
    x: np.ndarray,
    target,
    task: str = "classification",
    transform: TargetTransform | None = None,
    h: float = 1e-5,
) -> float:
    """Max relative error between analytic gradients and central finite
    differences over all parameters. Dropout must be disabled.

    The relative-error denominator is floored at 1e-5: central differences
    at step h carry roundoff ~|loss|*1e-16/(2h) plus O(h^2) truncation, so
    gradient components below that scale are noise, not signal."""
    if p.dropout != 0.0:
        raise ConfigError("grad_check requires dropout == 0")
    x = np.asarray(x, dtype=np.float64)
    p64 = MLPParams(
        p.w1.astype(np.float64),
        p.b1.astype(np.float64),
        p.w2.astype(np.float64),
        p.b2.astype(np.float64),
        0.0,
    )

    def loss_of(params: MLPParams) -> float:
        out, _ = _forward(params, x, False, None)
        if task == "classification":
            loss, _ = softmax_cross_entropy(out, target)
        else:
            loss, _ = combined_regression_loss(out, target, transform)
        return loss

    out, cache = _forward(p64, x, False, None)
    if task == "classification":
        _, dout = softmax_cross_entropy(out, target)
    else:
        _, dout = combined_regression_loss(out, target, transform)
    analytic = _backward(p64, cache, dout)

    worst = 0.0
    arrays = (p64.w1, p64.b1, p64.w2, p64.b2)
    for arr, grad in zip(arrays, analytic):
        flat = arr.ravel()
        gflat = np.asarray(grad, dtype=np.float64).ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_of(p64)
            flat[i] = orig - h
            down = loss_of(p64)
            flat[i] = orig
            numeric = (up - down) / (2 * h)
            denom = max(abs(gflat[i]), abs(numeric), 1e-5)
            err = abs(gflat[i] - numeric) / denom
            if err > worst:
                worst = err
    return worst


# --- checkpointing --------------------------------------------------------------


def _encode_f32(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<f4").tobytes()).decode("ascii")


def _decode_f32(blob: str, shape) -> np.ndarray:
    return np.frombuffer(base64.b64decode(blob), dtype="<f4").reshape(shape).copy()


def save_checkpoint(
    path: str | Path,
    params: MLPParams,
    transform: TargetTransform | None,
    hp: Hyperparams,
    metadata: dict | None = None,
) -> None:
    """Structured-text checkpoint: shapes, little-endian float32 parameters,
    transform statistics, hyperparameters. Reload reproduces eval outputs
    bitwise (parameters are float32 end to end)."""
    doc = {
        "shapes": {
            "w1": list(params.w1.shape),
            "b1": list(params.b1.shape),
            "w2": list(params.w2.shape),
            "b2": list(params.b2.shape),
        },
        "params": {
            "w1": _encode_f32(params.w1),
            "b1": _encode_f32(params.b1),
            "w2": _encode_f32(params.w2),
            "b2": _encode_f32(params.b2),
        },
        "dropout": params.dropout,
        "transform": None if transform is None else transform.to_dict(),
        "hyperparams": hp.to_dict(),
        "metadata": metadata or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_checkpoint(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    shapes = doc["shapes"]
    params = MLPParams(
        _decode_f32(doc["params"]["w1"], shapes["w1"]),
        _decode_f32(doc["params"]["b1"], shapes["b1"]),
        _decode_f32(doc["params"]["w2"], shapes["w2"]),
        _decode_f32(doc["params"]["b2"], shapes["b2"]),
        doc.get("dropout", 0.0),
    )
    transform = None if doc.get("transform") is None else TargetTransform.from_dict(doc["transform"])
    hp = Hyperparams.from_dict(doc["hyperparams"])
    return params, transform, hp, doc.get("metadata", {})
