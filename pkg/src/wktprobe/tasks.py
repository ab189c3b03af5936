"""The six evaluation tasks over frozen embeddings, and report assembly.

T1 geometry type (classification), T2 area (regression, log transform),
T3 centroid (regression, min-max), T4 spatial predicate (classification on
concatenated pair embeddings), T5 distance (regression, log transform),
T6 relation-conditioned retrieval (cosine top-k, no training).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .datasets import (
    GEOM_KINDS,
    LocationQuery,
    TaskDataset,
    TRIPLET_PREDICATES,
)
from .encoding import concat
from .errors import ConfigError, DataFormatError, EmptyInputError, EmptyPoolError
from .metrics import (
    mape_excluded_count,
    metric_accuracy,
    metric_mape,
    metric_precision_at_k,
    metric_rmse,
)
from .mlp import Hyperparams, TargetTransform, mlp_forward, train

VARIANTS = {
    "T1": ("default",),
    "T2": ("default", "polygon_only"),
    "T3": ("default",),
    "T4": ("without_geometry_type", "with_geometry_type"),
    "T5": ("default", "disjoint_only"),
    "T6": ("default",),
}

# Canonical report rows, mirroring the results-table layout.
REPORT_ROWS = (
    ("T1", "default", "Accuracy(%)"),
    ("T2", "default", "MAPE(%)"),
    ("T2", "polygon_only", "MAPE(%)"),
    ("T3", "default", "RMSE"),
    ("T4", "without_geometry_type", "Accuracy(%)"),
    ("T4", "with_geometry_type", "Accuracy(%)"),
    ("T5", "disjoint_only", "RMSE"),
    ("T6", "default", "Precision@5"),
)

VARIANT_LABELS = {
    "default": "",
    "polygon_only": "Polygon only",
    "without_geometry_type": "Without geometry type",
    "with_geometry_type": "With geometry type",
    "disjoint_only": "Disjoint only",
}

TASK_TITLES = {
    "T1": "T1: Geometry type",
    "T2": "T2: Area computation",
    "T3": "T3: Centroid derivation",
    "T4": "T4: Spatial predicate",
    "T5": "T5: Distance measure",
    "T6": "T6: Location prediction",
}

T2_DEFAULT_LABEL = "All geometries"


@dataclass(frozen=True)
class TaskSpec:
    task_id: str
    variant: str = "default"
    encoder_id: str = ""
    k: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.task_id not in VARIANTS:
            raise ConfigError(f"unknown task {self.task_id!r}")
        if self.variant not in VARIANTS[self.task_id]:
            raise ConfigError(f"variant {self.variant!r} invalid for {self.task_id}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")


@dataclass
class MetricsReport:
    task_id: str
    variant: str
    metric_name: str
    validation: float | None
    test: float
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "variant": self.variant,
            "metric_name": self.metric_name,
            "validation": self.validation,
            "test": self.test,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(
            d["task_id"],
            d["variant"],
            d["metric_name"],
            d["validation"],
            d["test"],
            d.get("metadata", {}),
        )


class VectorIndex:
    """Dense cosine-similarity index; ties break by ascending id."""

    def __init__(self, dim: int):
        self.dim = dim
        self.ids: list[str] = []
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._norms: np.ndarray | None = None

    def insert(self, rid: str, vec: np.ndarray) -> None:
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.dim,):
            raise DataFormatError(f"vector dim {vec.shape} != ({self.dim},)")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise DataFormatError(f"zero vector rejected for id {rid!r}")
        self.ids.append(rid)
        self._rows.append(vec)
        self._matrix = None

    def _ensure(self):
        if self._matrix is None:
            self._matrix = np.stack(self._rows)
            self._norms = np.linalg.norm(self._matrix, axis=1)

    def query(self, vec: np.ndarray, k: int) -> list[str]:
        if not self.ids:
            raise EmptyPoolError("vector index is empty")
        self._ensure()
        vec = np.asarray(vec, dtype=np.float64)
        qnorm = float(np.linalg.norm(vec))
        if qnorm == 0.0:
            raise DataFormatError("zero query vector")
        sims = (self._matrix @ vec) / (self._norms * qnorm)
        order = sorted(range(len(self.ids)), key=lambda i: (-sims[i], self.ids[i]))
        return [self.ids[i] for i in order[: min(k, len(order))]]


# --- shared assembly helpers ---------------------------------------------------


def _split_arrays(dataset: TaskDataset, featurize, targetize):
    out = {name: ([], []) for name in ("train", "validation", "test")}
    for ex in dataset.examples:
        if ex.split not in out:
            raise DataFormatError(f"example with unknown split {ex.split!r}")
        feats, targs = out[ex.split]
        feats.append(featurize(ex))
        targs.append(targetize(ex))
    return out


def _require_nonempty(parts, task_id):
    for name in ("train", "validation", "test"):
        if not parts[name][0]:
            raise EmptyInputError(f"{task_id}: empty {name} split")


def _stack(parts):
    return {
        name: (np.stack(feats).astype(np.float32), targs)
        for name, (feats, targs) in parts.items()
    }


def _standardize(arrays):
    """Z-score all splits with statistics fitted on the training split only.

    Mean-pooled embedding components and appended one-hot features live on
    very different scales; probes train on standardized inputs."""
    mu = arrays["train"][0].mean(axis=0)
    sd = arrays["train"][0].std(axis=0) + np.float32(1e-6)
    return {name: ((x - mu) / sd, y) for name, (x, y) in arrays.items()}


def _base_metadata(dataset_sizes: dict, hp: Hyperparams, encoder_id: str, extra: dict | None = None):
    md = {
        "seed": hp.seed,
        "dataset_sizes": dataset_sizes,
        "encoder_id": encoder_id,
    }
    if extra:
        md.update(extra)
    return md


def _classification_run(
    task_id: str,
    variant: str,
    dataset: TaskDataset,
    featurize,
    classes: tuple[str, ...],
    hp: Hyperparams,
    encoder_id: str,
    extra_md: dict | None = None,
) -> MetricsReport:
    cls_index = {c: i for i, c in enumerate(classes)}
    parts = _split_arrays(dataset, featurize, lambda ex: cls_index[_class_of(ex.target)])
    _require_nonempty(parts, task_id)
    arrays = _standardize(_stack(parts))
    params, history = train(
        arrays["train"][0],
        np.asarray(arrays["train"][1]),
        arrays["validation"][0],
        np.asarray(arrays["validation"][1]),
        hp,
        task="classification",
        out_dim=len(classes),
    )

    def accuracy(split):
        x, y = arrays[split]
        pred = mlp_forward(params, x).argmax(axis=1)
        return metric_accuracy(pred.tolist(), list(y))

    sizes = {name: len(arrays[name][1]) for name in arrays}
    md = _base_metadata(sizes, hp, encoder_id, extra_md)
    md["classes"] = list(classes)
    md["best_epoch"] = history.best_epoch
    return MetricsReport(task_id, variant, "accuracy_pct", accuracy("validation"), accuracy("test"), md)


def _class_of(target) -> str:
    return target if isinstance(target, str) else str(target)


def _regression_run(
    task_id: str,
    variant: str,
    dataset: TaskDataset,
    featurize,
    targetize,
    transform_kind: str,
    metric: str,
    hp: Hyperparams,
    encoder_id: str,
    extra_md: dict | None = None,
) -> MetricsReport:
    parts = _split_arrays(dataset, featurize, targetize)
    _require_nonempty(parts, task_id)
    arrays = _standardize(_stack(parts))
    y_train = np.asarray(arrays["train"][1], dtype=np.float64)
    if transform_kind == "minmax":
        transform = TargetTransform.fit_minmax(y_train)
    else:
        transform = TargetTransform(transform_kind)
    params, history = train(
        arrays["train"][0],
        y_train,
        arrays["validation"][0],
        np.asarray(arrays["validation"][1], dtype=np.float64),
        hp,
        task="regression",
        transform=transform,
    )

    def predictions(split):
        x, y = arrays[split]
        pred_t = mlp_forward(params, x).astype(np.float64)
        y = np.asarray(y, dtype=np.float64)
        if y.ndim == 1:
            y = y[:, None]
        if pred_t.ndim == 1:
            pred_t = pred_t[:, None]
        return transform.inverse(pred_t), y

    sizes = {name: len(arrays[name][1]) for name in arrays}
    md = _base_metadata(sizes, hp, encoder_id, extra_md)
    md["transform"] = transform_kind
    md["best_epoch"] = history.best_epoch

    if metric == "mape_pct":
        vals = {}
        for split in ("validation", "test"):
            pred, y = predictions(split)
            vals[split] = metric_mape(pred, y)
            md[f"mape_excluded_zero_targets_{split}"] = mape_excluded_count(y)
        return MetricsReport(task_id, variant, "mape_pct", vals["validation"], vals["test"], md)

    vals = {}
    for split in ("validation", "test"):
        pred, y = predictions(split)
        vals[split] = metric_rmse(pred, y)
    return MetricsReport(task_id, variant, "rmse", vals["validation"], vals["test"], md)


# --- task runners ----------------------------------------------------------------


def run_t1(
    dataset: TaskDataset,
    vectors: dict[str, np.ndarray],
    hp: Hyperparams,
    encoder_id: str = "",
) -> MetricsReport:
    """3-class geometry-type probe on Enc(g)."""
    return _classification_run(
        "T1",
        "default",
        dataset,
        lambda ex: vectors[ex.ids[0]],
        GEOM_KINDS,
        hp,
        encoder_id,
    )


def run_t2(
    dataset: TaskDataset,
    vectors: dict[str, np.ndarray],
    kinds: dict[str, str],
    hp: Hyperparams,
    variant: str = "default",
    encoder_id: str = "",
) -> MetricsReport:
    """Area regression with log transform and combined loss; MAPE on the
    original scale (zero-area rows excluded from the metric, not training)."""
    TaskSpec("T2", variant)
    ds = dataset
    if variant == "polygon_only":
        ds = TaskDataset("T2", [ex for ex in dataset.examples if kinds[ex.ids[0]] == "Polygon"])
    return _regression_run(
        "T2",
        variant,
        ds,
        lambda ex: vectors[ex.ids[0]],
        lambda ex: float(ex.target),
        "log",
        "mape_pct",
        hp,
        encoder_id,
    )


def run_t3(
    dataset: TaskDataset,
    vectors: dict[str, np.ndarray],
    hp: Hyperparams,
    encoder_id: str = "",
) -> MetricsReport:
    """2-output centroid regression, min-max normalized targets; RMSE in
    degrees on the original scale over both coordinates."""
    return _regression_run(
        "T3",
        "default",
        dataset,
        lambda ex: vectors[ex.ids[0]],
        lambda ex: (float(ex.target[0]), float(ex.target[1])),
        "minmax",
        "rmse",
        hp,
        encoder_id,
    )


def _one_hot_kind(kind: str) -> np.ndarray:
    vec = np.zeros(len(GEOM_KINDS), dtype=np.float32)
    vec[GEOM_KINDS.index(kind)] = 1.0
    return vec


def run_t4(
    dataset: TaskDataset,
    vectors: dict[str, np.ndarray],
    kinds: dict[str, str],
    hp: Hyperparams,
    variant: str = "without_geometry_type",
    encoder_id: str = "",
) -> MetricsReport:
    """7-class predicate probe on [Enc(subject); Enc(object)]; the
    with_geometry_type variant appends one-hot subject and object types."""
    TaskSpec("T4", variant)
    with_type = variant == "with_geometry_type"

    def featurize(ex):
        sid, oid = ex.ids
        feat = concat(vectors[sid], vectors[oid])
        if with_type:
            feat = np.concatenate([feat, _one_hot_kind(kinds[sid]), _one_hot_kind(kinds[oid])])
        return feat

    return _classification_run(
        "T4",
        variant,
        dataset,
        featurize,
        TRIPLET_PREDICATES,
        hp,
        encoder_id,
        extra_md={"with_geometry_type": with_type},
    )


def run_t5(
    dataset: TaskDataset,
    vectors: dict[str, np.ndarray],
    hp: Hyperparams,
    variant: str = "default",
    encoder_id: str = "",
) -> MetricsReport:
    """Distance regression on concatenated embeddings, log transform; RMSE in
    degrees. disjoint_only filters to predicate == disjoint."""
    TaskSpec("T5", variant)
    ds = dataset
    if variant == "disjoint_only":
        ds = TaskDataset(
            "T5", [ex for ex in dataset.examples if ex.target["predicate"] == "disjoint"]
        )
    return _regression_run(
        "T5",
        variant,
        ds,
        lambda ex: concat(vectors[ex.ids[0]], vectors[ex.ids[1]]),
        lambda ex: float(ex.target["distance"]),
        "log",
        "rmse",
        hp,
        encoder_id,
    )


def run_t6(
    queries: list[LocationQuery],
    subject_vectors: dict[str, np.ndarray],
    query_vectors: dict[str, np.ndarray],
    k: int = 5,
    encoder_id: str = "",
) -> MetricsReport:
    """Relation-conditioned retrieval: cosine top-k of Enc(rel, object) over
    the pool of all distinct answer-set subjects; mean P@k. No training, so
    the validation column is absent by design.

    query_vectors is keyed by phrase_cache_id(predicate, object_id).
    """
    from .encoding import phrase_cache_id

    if not queries:
        raise EmptyInputError("no location queries to evaluate")
    pool_ids = sorted({sid for q in queries for sid in q.answers})
    if not pool_ids:
        raise EmptyPoolError("no subjects in any answer set")
    dim = len(next(iter(subject_vectors.values())))
    index = VectorIndex(dim)
    for sid in pool_ids:
        index.insert(sid, subject_vectors[sid])

    per_query = []
    by_predicate: dict[str, list[float]] = {}
    for q in queries:
        qvec = query_vectors[phrase_cache_id(q.predicate, q.object_id)]
        retrieved = index.query(qvec, k)
        p_at_k = metric_precision_at_k(retrieved, q.answers, min(k, len(retrieved)))
        per_query.append(p_at_k)
        by_predicate.setdefault(q.predicate, []).append(p_at_k)

    md = {
        "k": k,
        "pool_size": len(pool_ids),
        "num_queries": len(queries),
        "encoder_id": encoder_id,
        "per_predicate": {
            pred: float(np.mean(vals)) for pred, vals in sorted(by_predicate.items())
        },
        "pool": "all distinct answer-set subjects",
    }
    return MetricsReport("T6", "default", "precision_at_k", None, float(np.mean(per_query)), md)


# --- report assembly ---------------------------------------------------------------


def _fmt(v: float | None) -> str:
    if v is None:
        return "N/A"
    if abs(v) >= 1000:
        return f"{v:.0f}"
    return f"{v:.4g}"


def build_report(reports: list[MetricsReport]) -> tuple[list[dict], str]:
    """Machine-readable rows plus a human-readable comparison table with one
    row per task/variant and validation/test columns per encoder."""
    rows = [r.to_dict() for r in reports]
    encoders = sorted({r.metadata.get("encoder_id", "") for r in reports})
    by_key = {}
    for r in reports:
        by_key[(r.task_id, r.variant, r.metadata.get("encoder_id", ""))] = r

    header = ["Task", "Variant", "Metric"]
    for enc in encoders:
        header += [f"{enc or 'encoder'} Val", f"{enc or 'encoder'} Test"]
    lines = []
    for task_id, variant, metric_name in REPORT_ROWS:
        label = VARIANT_LABELS[variant]
        if task_id == "T2" and variant == "default":
            label = T2_DEFAULT_LABEL
        row = [TASK_TITLES[task_id], label, metric_name]
        for enc in encoders:
            rep = by_key.get((task_id, variant, enc))
            if rep is None:
                row += ["N/A", "N/A"]
            else:
                row += [_fmt(rep.validation), _fmt(rep.test)]
        lines.append(row)

    widths = [max(len(str(line[i])) for line in [header] + lines) for i in range(len(header))]
    table = []
    table.append("  ".join(str(h).ljust(w) for h, w in zip(header, widths)))
    table.append("  ".join("-" * w for w in widths))
    for line in lines:
        table.append("  ".join(str(c).ljust(w) for c, w in zip(line, widths)))
    return rows, "\n".join(table) + "\n"
