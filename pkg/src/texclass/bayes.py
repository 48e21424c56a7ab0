"""Gaussian maximum-likelihood classifier with full per-class covariance.

Class-conditional densities are multivariate Gaussians fitted by maximum
likelihood (population covariance).  Priors are equal, so classification
maximizes the class-conditional log-likelihood, evaluated entirely in the
log domain.  Near-singular covariances (more features than samples) are
ridge-regularized with an escalating diagonal load.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ClassModel",
    "LabeledDataset",
    "EvalResult",
    "fit",
    "log_likelihood",
    "classify",
    "evaluate",
    "standardize",
    "subset",
    "save_models",
    "load_models",
]

_COND_LIMIT = 1e10
_MAGIC = b"TEXMODEL"
_VERSION = 1


@dataclass(frozen=True, eq=False)
class ClassModel:
    """Gaussian model of one class: mean, covariance and derived terms.

    ``covariance`` already includes any ridge that was applied;
    ``regularization_used`` records the diagonal load (0 if none).
    """

    label: str
    mean: np.ndarray
    covariance: np.ndarray
    precision: np.ndarray
    log_det: float
    regularization_used: float = 0.0

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature matrix with per-row class labels and train/test split."""

    features: np.ndarray
    labels: np.ndarray
    split: np.ndarray
    feature_names: tuple[str, ...]
    degenerate_count: int = 0

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("features contain non-finite values")
        if len(self.labels) != x.shape[0] or len(self.split) != x.shape[0]:
            raise ValueError("labels/split length must match feature rows")
        if len(self.feature_names) != x.shape[1]:
            raise ValueError("feature_names length must match feature columns")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", np.asarray(self.labels))
        object.__setattr__(self, "split", np.asarray(self.split))

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True, eq=False)
class EvalResult:
    """Accuracy summary over one split."""

    class_labels: tuple[str, ...]
    per_class_accuracy: dict[str, float]
    overall_accuracy: float        # pooled: correct / total
    mean_class_accuracy: float     # unweighted mean of per-class accuracies
    confusion: np.ndarray          # rows = true class, cols = predicted


def subset(dataset: LabeledDataset, split: str) -> LabeledDataset:
    """Rows of one split, as a new dataset."""
    mask = dataset.split == split
    return LabeledDataset(
        dataset.features[mask],
        dataset.labels[mask],
        dataset.split[mask],
        dataset.feature_names,
        dataset.degenerate_count,
    )


def _build_model(label: str, mean: np.ndarray, cov: np.ndarray, ridge: float) -> ClassModel:
    n = mean.size
    cov = (cov + cov.T) / 2.0
    base = ridge * np.trace(cov) / n
    load = 0.0
    for attempt in range(11):
        if attempt > 0:
            load = base * 10.0 ** (attempt - 1)
        sigma = cov + load * np.eye(n)
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            continue
        if np.linalg.cond(sigma) > _COND_LIMIT:
            continue
        log_det = 2.0 * float(np.sum(np.log(np.diagonal(chol))))
        inv_chol = np.linalg.solve(chol, np.eye(n))
        precision = inv_chol.T @ inv_chol
        return ClassModel(label, mean, sigma, precision, log_det, load)
    raise ValueError(
        f"covariance for class {label!r} not positive definite after ridge escalation"
    )


def fit(train: LabeledDataset, ridge: float = 1e-6, diagonal: bool = False) -> list[ClassModel]:
    """Fit one Gaussian per class by maximum likelihood.

    Covariances use the population divisor (m, not m - 1).  A covariance
    that is not positive definite, or whose condition number exceeds 1e10,
    gets ``ridge * trace / n`` added to its diagonal, escalating tenfold up
    to 10 times.  ``diagonal=True`` keeps only the per-feature variances.
    Classes are fitted in sorted label order.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    labels = sorted(set(train.labels.tolist()))
    models = []
    for label in labels:
        rows = train.features[train.labels == label]
        if rows.shape[0] < 2:
            raise ValueError(f"class {label!r} has fewer than 2 training samples")
        mean = rows.mean(axis=0)
        centered = rows - mean
        cov = centered.T @ centered / rows.shape[0]
        if diagonal:
            cov = np.diag(np.diagonal(cov))
        models.append(_build_model(label, mean, cov, ridge))
    return models


def log_likelihood(model: ClassModel, x: np.ndarray) -> float:
    """ln of the Gaussian class-conditional density at x, never exponentiated."""
    x = np.asarray(x, dtype=float)
    if x.shape != (model.dim,):
        raise ValueError(f"expected vector of dim {model.dim}, got shape {x.shape}")
    delta = x - model.mean
    quad = float(delta @ model.precision @ delta)
    return -0.5 * (model.dim * math.log(2.0 * math.pi) + model.log_det + quad)


def classify(models: list[ClassModel], x: np.ndarray) -> tuple[str, np.ndarray]:
    """Most likely class label plus all per-class log-likelihoods.

    Ties resolve to the lowest model index.
    """
    if not models:
        raise ValueError("empty model list")
    scores = np.array([log_likelihood(m, x) for m in models])
    return models[int(np.argmax(scores))].label, scores


def evaluate(models: list[ClassModel], dataset: LabeledDataset) -> EvalResult:
    """Accuracies and confusion matrix of the models over a dataset."""
    if dataset.features.shape[0] == 0:
        raise ValueError("empty dataset")
    class_labels = tuple(m.label for m in models)
    index = {label: k for k, label in enumerate(class_labels)}
    confusion = np.zeros((len(models), len(models)), dtype=np.int64)
    for row, truth in zip(dataset.features, dataset.labels):
        predicted, _ = classify(models, row)
        confusion[index[str(truth)], index[predicted]] += 1
    totals = confusion.sum(axis=1)
    per_class = {
        label: float(confusion[k, k] / totals[k]) if totals[k] else 0.0
        for k, label in enumerate(class_labels)
    }
    present = totals > 0
    overall = float(np.trace(confusion) / confusion.sum())
    mean_class = float(np.mean([per_class[label] for k, label in enumerate(class_labels) if present[k]]))
    return EvalResult(class_labels, per_class, overall, mean_class, confusion)


def standardize(
    dataset: LabeledDataset,
) -> tuple[LabeledDataset, tuple[np.ndarray, np.ndarray]]:
    """Z-score all rows using train-split statistics.

    Zero-variance features keep scale 1 so they pass through unchanged.
    Returns the transformed dataset and the (mean, scale) pair for
    applying the same transform at inference time.
    """
    train_rows = dataset.features[dataset.split == "train"]
    center = train_rows.mean(axis=0)
    scale = train_rows.std(axis=0)
    scale = np.where(scale == 0.0, 1.0, scale)
    transformed = (dataset.features - center) / scale
    out = LabeledDataset(
        transformed, dataset.labels, dataset.split, dataset.feature_names,
        dataset.degenerate_count,
    )
    return out, (center, scale)


def save_models(models: list[ClassModel], path: str | Path) -> None:
    """Serialize models to a little-endian flat binary file.

    Layout: magic, version, class count, then per class the label, the
    dimension, the mean, the (regularized) covariance row-major, and the
    ridge that was applied.  Round-trips are bit-exact.
    """
    parts = [_MAGIC, struct.pack("<II", _VERSION, len(models))]
    for m in models:
        label = m.label.encode("utf-8")
        parts.append(struct.pack("<I", len(label)))
        parts.append(label)
        parts.append(struct.pack("<I", m.dim))
        parts.append(m.mean.astype("<f8").tobytes())
        parts.append(np.ascontiguousarray(m.covariance, dtype="<f8").tobytes())
        parts.append(struct.pack("<d", m.regularization_used))
    Path(path).write_bytes(b"".join(parts))


def load_models(path: str | Path) -> list[ClassModel]:
    """Read back a model file written by :func:`save_models`."""
    data = Path(path).read_bytes()
    if data[: len(_MAGIC)] != _MAGIC:
        raise ValueError(f"not a model file: {path}")
    pos = len(_MAGIC)
    version, count = struct.unpack_from("<II", data, pos)
    pos += 8
    if version != _VERSION:
        raise ValueError(f"unsupported model file version {version}")
    models = []
    for _ in range(count):
        (label_len,) = struct.unpack_from("<I", data, pos)
        pos += 4
        label = data[pos : pos + label_len].decode("utf-8")
        pos += label_len
        (n,) = struct.unpack_from("<I", data, pos)
        pos += 4
        mean = np.frombuffer(data, dtype="<f8", count=n, offset=pos).copy()
        pos += 8 * n
        cov = np.frombuffer(data, dtype="<f8", count=n * n, offset=pos).reshape(n, n).copy()
        pos += 8 * n * n
        (reg,) = struct.unpack_from("<d", data, pos)
        pos += 8
        chol = np.linalg.cholesky(cov)
        log_det = 2.0 * float(np.sum(np.log(np.diagonal(chol))))
        inv_chol = np.linalg.solve(chol, np.eye(n))
        models.append(ClassModel(label, mean, cov, inv_chol.T @ inv_chol, log_det, reg))
    return models
