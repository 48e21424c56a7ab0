"""End-to-end experiment runner: segment, extract, classify, report.

Runs every selected extractor over a labeled image set, evaluates the
Gaussian classifier on each method singly and on method combinations,
and renders the results as markdown tables or a full-precision CSV that
parses back losslessly.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import bayes, fractal, gmrf, statxture
from .imaging import (
    Segment,
    SegmentationConfig,
    load_pgm,
    quantize,
    segment_image,
    split_train_test,
)

__all__ = [
    "METHODS",
    "METHOD_LABELS",
    "ExperimentConfig",
    "CombinationResult",
    "AccuracyReport",
    "parse_config",
    "feature_names",
    "extract_features",
    "extract_all",
    "combine_features",
    "run_experiment",
    "render_report",
    "parse_report_csv",
]

# Canonical method order; combinations always concatenate in this order.
METHODS = ("gmrf", "fbm", "glcm", "rlm", "acf")
METHOD_LABELS = {"gmrf": "GMRF", "fbm": "fBm", "glcm": "GLCM", "rlm": "RLM", "acf": "ACF"}

_COMBINATION_SIZES = {"single": 1, "pairs": 2, "triples": 3}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a full experiment run needs, with the defaults documented.

    ``images`` maps each class name to one source image path.
    ``combinations`` selects which combination sizes to evaluate
    (1 = single methods, 2 = pairs, 3 = triples).
    """

    images: tuple[tuple[str, str], ...]  # (path, class name)
    segmentation: SegmentationConfig = SegmentationConfig()
    train_count: int = 64
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    combinations: frozenset[int] = frozenset({1, 2})
    glcm_levels: int = 32
    rlm_levels: int = 16
    acf_max_shift: int = 16
    fbm: fractal.FbmConfig = fractal.FbmConfig()
    classifier_mode: str = "full"  # or "diagonal"
    ridge: float = 1e-6
    standardize: bool = False
    cache_dir: str | None = None

    def __post_init__(self):
        if not self.methods:
            raise ValueError("at least one method required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}; choose from {METHODS}")
        classes = [c for _, c in self.images]
        if len(set(classes)) != len(classes):
            raise ValueError("class names must be unique (one image per class)")
        if self.classifier_mode not in ("full", "diagonal"):
            raise ValueError(f"classifier_mode must be 'full' or 'diagonal'")
        # keep methods in canonical order regardless of input order
        ordered = tuple(m for m in METHODS if m in self.methods)
        object.__setattr__(self, "methods", ordered)


@dataclass(frozen=True, eq=False)
class CombinationResult:
    """Accuracy record for one method combination."""

    methods: tuple[str, ...]
    feature_count: int
    train_accuracy: float
    test_accuracy: float
    per_class_train: dict[str, float]
    per_class_test: dict[str, float]
    confusion: np.ndarray  # test split; rows = true, cols = predicted
    regularization_used: float
    error: str | None = None

    @property
    def name(self) -> str:
        return " & ".join(METHOD_LABELS[m] for m in self.methods)


@dataclass(frozen=True, eq=False)
class AccuracyReport:
    """All combination results, sorted by descending test accuracy."""

    class_labels: tuple[str, ...]
    rows: tuple[CombinationResult, ...]


def parse_config(path: str | Path) -> ExperimentConfig:
    """Parse a flat key-value experiment config file.

    Lines are ``key = value``; ``#`` starts a comment.  ``image.<class>``
    entries build the image manifest; all other keys override a default:

        segment_size = 32        stride = 16           boundary = wrap
        train_count = 64         seed = 0
        methods = gmrf,fbm,glcm,rlm,acf
        combinations = single,pairs
        glcm_levels = 32         rlm_levels = 16       acf_max_shift = 16
        fbm_window_radius = 8    fbm_max_distance = 4
        classifier = full        ridge = 1e-6          standardize = false
        cache_dir =
    """
    pairs: dict[str, str] = {}
    images = []
    base = Path(path).parent
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("image."):
            images.append((str((base / value).resolve()), key[len("image.") :]))
        else:
            pairs[key] = value
    kwargs: dict = {"images": tuple(images)}
    seg_kwargs = {}
    for key, attr in (("segment_size", "segment_size"), ("stride", "stride"), ("boundary", "boundary")):
        if key in pairs:
            seg_kwargs[attr] = pairs.pop(key) if key == "boundary" else int(pairs.pop(key))
    if seg_kwargs:
        kwargs["segmentation"] = SegmentationConfig(**seg_kwargs)
    fbm_kwargs = {}
    if "fbm_window_radius" in pairs:
        fbm_kwargs["window_radius"] = int(pairs.pop("fbm_window_radius"))
    if "fbm_max_distance" in pairs:
        fbm_kwargs["max_distance"] = int(pairs.pop("fbm_max_distance"))
    if fbm_kwargs:
        kwargs["fbm"] = fractal.FbmConfig(**fbm_kwargs)
    for key, cast in (
        ("train_count", int),
        ("seed", int),
        ("glcm_levels", int),
        ("rlm_levels", int),
        ("acf_max_shift", int),
        ("ridge", float),
    ):
        if key in pairs:
            kwargs[key] = cast(pairs.pop(key))
    if "methods" in pairs:
        kwargs["methods"] = tuple(m.strip() for m in pairs.pop("methods").split(",") if m.strip())
    if "combinations" in pairs:
        sizes = set()
        for word in pairs.pop("combinations").split(","):
            word = word.strip()
            if word not in _COMBINATION_SIZES:
                raise ValueError(f"unknown combination kind {word!r}")
            sizes.add(_COMBINATION_SIZES[word])
        kwargs["combinations"] = frozenset(sizes)
    if "classifier" in pairs:
        kwargs["classifier_mode"] = pairs.pop("classifier")
    if "standardize" in pairs:
        kwargs["standardize"] = pairs.pop("standardize").lower() in ("true", "1", "yes")
    if "cache_dir" in pairs:
        value = pairs.pop("cache_dir")
        kwargs["cache_dir"] = str((base / value).resolve()) if value else None
    if pairs:
        raise ValueError(f"unknown config keys: {sorted(pairs)}")
    return ExperimentConfig(**kwargs)


def feature_names(method: str, cfg: ExperimentConfig | None = None) -> tuple[str, ...]:
    """Column names for one method, matching the extracted vector order."""
    if method == "gmrf":
        return tuple(f"gmrf.{n}" for n in gmrf.FEATURE_NAMES)
    if method == "fbm":
        return tuple(f"fbm.{n}" for n in fractal.FEATURE_NAMES)
    if method == "glcm":
        return tuple(
            f"glcm.{n}.{d}" for d in statxture.DIRECTIONS for n in statxture.GLCM_FEATURE_NAMES
        )
    if method == "rlm":
        return tuple(
            f"rlm.{n}.{d}" for d in statxture.DIRECTIONS for n in statxture.RLM_FEATURE_NAMES
        )
    if method == "acf":
        return tuple(f"acf.{n}" for n in statxture.ACF_FEATURE_NAMES)
    raise ValueError(f"unknown method {method!r}")


def extract_features(segment: Segment, method: str, cfg: ExperimentConfig) -> np.ndarray:
    """Feature vector of one segment under one method's configuration."""
    pixels = segment.pixels
    if method == "gmrf":
        return gmrf.gmrf_features(pixels, on_degenerate="zeros")
    if method == "fbm":
        return fractal.fbm_features(pixels, cfg.fbm)
    if method == "glcm":
        return statxture.glcm_feature_vector(quantize(pixels, cfg.glcm_levels), cfg.glcm_levels)
    if method == "rlm":
        return statxture.rlm_feature_vector(quantize(pixels, cfg.rlm_levels), cfg.rlm_levels)
    if method == "acf":
        return statxture.acf_features(pixels, cfg.acf_max_shift, on_degenerate="zeros")
    raise ValueError(f"unknown method {method!r}")


def _is_degenerate(method: str, vector: np.ndarray) -> bool:
    if method in ("gmrf", "acf"):
        return not vector.any()
    return False


def _dataset_key(segments: list[Segment], method: str, cfg: ExperimentConfig) -> str:
    digest = hashlib.sha256()
    digest.update(method.encode())
    digest.update(
        repr(
            (
                cfg.glcm_levels,
                cfg.rlm_levels,
                cfg.acf_max_shift,
                cfg.fbm.window_radius,
                cfg.fbm.max_distance,
            )
        ).encode()
    )
    for seg in segments:
        digest.update(seg.label.encode())
        digest.update(np.int64(seg.origin).tobytes())
        digest.update(seg.pixels.tobytes())
    return digest.hexdigest()


def _cache_load(path: Path, names: tuple[str, ...]) -> np.ndarray | None:
    if not path.exists():
        return None
    with np.load(path) as bundle:
        if tuple(bundle["names"]) != names:
            return None
        return bundle["features"]


def extract_all(
    segments: list[Segment],
    methods: tuple[str, ...],
    cfg: ExperimentConfig,
) -> dict[str, bayes.LabeledDataset]:
    """One aligned dataset per method, rows in the given segment order.

    Degenerate segments yield their designated all-zero vectors; the count
    of such rows is recorded on the dataset.  With ``cfg.cache_dir`` set,
    extracted matrices are reused across runs keyed by segment content and
    extractor configuration.
    """
    if not methods:
        raise ValueError("empty method list")
    labels = np.array([seg.label for seg in segments])
    split = np.array([seg.split or "" for seg in segments])
    datasets = {}
    for method in methods:
        names = feature_names(method)
        cache_path = None
        matrix = None
        if cfg.cache_dir is not None:
            cache_dir = Path(cfg.cache_dir)
            cache_dir.mkdir(parents=True, exist_ok=True)
            cache_path = cache_dir / f"{_dataset_key(segments, method, cfg)}.npz"
            matrix = _cache_load(cache_path, names)
        if matrix is None:
            matrix = np.array([extract_features(seg, method, cfg) for seg in segments])
            if cache_path is not None:
                np.savez_compressed(cache_path, features=matrix, names=np.array(names))
        degenerate = sum(_is_degenerate(method, row) for row in matrix)
        datasets[method] = bayes.LabeledDataset(matrix, labels, split, names, degenerate)
    return datasets


def combine_features(datasets: list[bayes.LabeledDataset]) -> bayes.LabeledDataset:
    """Column-wise concatenation of row-aligned datasets."""
    if not datasets:
        raise ValueError("no datasets to combine")
    if len(datasets) == 1:
        return datasets[0]
    first = datasets[0]
    for other in datasets[1:]:
        if other.features.shape[0] != first.features.shape[0]:
            raise ValueError("datasets have different row counts")
        if not np.array_equal(other.labels, first.labels):
            raise ValueError("datasets disagree on row labels")
        if not np.array_equal(other.split, first.split):
            raise ValueError("datasets disagree on row splits")
    return bayes.LabeledDataset(
        np.hstack([ds.features for ds in datasets]),
        first.labels,
        first.split,
        tuple(itertools.chain.from_iterable(ds.feature_names for ds in datasets)),
        sum(ds.degenerate_count for ds in datasets),
    )


def _evaluate_combination(
    combo: tuple[str, ...],
    datasets: dict[str, bayes.LabeledDataset],
    cfg: ExperimentConfig,
    class_labels: tuple[str, ...],
) -> CombinationResult:
    dataset = combine_features([datasets[m] for m in combo])
    width = dataset.n_features
    try:
        if cfg.standardize:
            dataset, _ = bayes.standardize(dataset)
        models = bayes.fit(
            bayes.subset(dataset, "train"),
            ridge=cfg.ridge,
            diagonal=cfg.classifier_mode == "diagonal",
        )
        ev_train = bayes.evaluate(models, bayes.subset(dataset, "train"))
        ev_test = bayes.evaluate(models, bayes.subset(dataset, "test"))
    except (ValueError, np.linalg.LinAlgError) as exc:
        nan_scores = {label: math.nan for label in class_labels}
        return CombinationResult(
            combo, width, math.nan, math.nan, nan_scores, dict(nan_scores),
            np.zeros((len(class_labels), len(class_labels)), dtype=np.int64),
            math.nan, error=str(exc),
        )
    return CombinationResult(
        combo,
        width,
        ev_train.overall_accuracy,
        ev_test.overall_accuracy,
        ev_train.per_class_accuracy,
        ev_test.per_class_accuracy,
        ev_test.confusion,
        max(m.regularization_used for m in models),
    )


def build_segments(cfg: ExperimentConfig) -> list[Segment]:
    """Load, segment and split every image of the manifest.

    Rows come out in a canonical deterministic order: train segments first,
    then test, each grouped by sorted class and row-major origin.
    """
    segments: list[Segment] = []
    for path, label in sorted(cfg.images, key=lambda item: item[1]):
        segments.extend(segment_image(load_pgm(path), cfg.segmentation, label))
    train, test = split_train_test(segments, cfg.train_count, cfg.seed)
    return train + test


def run_experiment(cfg: ExperimentConfig) -> AccuracyReport:
    """Run every selected method combination and collect accuracy rows.

    Rows are sorted by descending test accuracy (ties by canonical
    combination order); a failing combination becomes an error row rather
    than aborting the sweep.  Fully deterministic under cfg.seed.
    """
    segments = build_segments(cfg)
    datasets = extract_all(segments, cfg.methods, cfg)
    class_labels = tuple(sorted({label for _, label in cfg.images}))
    combos = [
        combo
        for size in sorted(cfg.combinations)
        for combo in itertools.combinations(cfg.methods, size)
    ]
    rows = [_evaluate_combination(combo, datasets, cfg, class_labels) for combo in combos]
    order = sorted(
        range(len(rows)),
        key=lambda k: (
            -(rows[k].test_accuracy if not math.isnan(rows[k].test_accuracy) else -1.0),
            k,
        ),
    )
    return AccuracyReport(class_labels, tuple(rows[k] for k in order))


def _pct(value: float) -> str:
    return "error" if math.isnan(value) else f"{value * 100:.2f}%"


def render_report(report: AccuracyReport, fmt: str = "markdown") -> str:
    """Render a report as markdown tables or a lossless CSV.

    Markdown shows per-class train/test accuracy for single methods and a
    combination table with percentages to 2 decimals.  CSV carries every
    numeric field at full precision so parsing it back reproduces the
    report exactly.
    """
    if fmt == "markdown":
        return _render_markdown(report)
    if fmt == "csv":
        return _render_csv(report)
    raise ValueError(f"unknown format {fmt!r}; use 'markdown' or 'csv'")


def _render_markdown(report: AccuracyReport) -> str:
    lines = ["# Texture classification report", ""]
    singles = [row for row in report.rows if len(row.methods) == 1]
    if singles:
        singles = sorted(singles, key=lambda r: METHODS.index(r.methods[0]))
        lines.append("## Single-method accuracy by class")
        lines.append("")
        header = ["Class"]
        for row in singles:
            header += [f"{row.name} train", f"{row.name} test"]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for label in report.class_labels:
            cells = [label]
            for row in singles:
                cells.append(_pct(row.per_class_train.get(label, math.nan)))
                cells.append(_pct(row.per_class_test.get(label, math.nan)))
            lines.append("| " + " | ".join(cells) + " |")
        overall = ["overall"]
        for row in singles:
            overall += [_pct(row.train_accuracy), _pct(row.test_accuracy)]
        lines.append("| " + " | ".join(overall) + " |")
        lines.append("")
    lines.append("## Accuracy by method combination")
    lines.append("")
    lines.append("| Methods | Features | Train accuracy | Test accuracy |")
    lines.append("|---|---|---|---|")
    for row in report.rows:
        train = _pct(row.train_accuracy) if row.error is None else "error"
        test = _pct(row.test_accuracy) if row.error is None else "error"
        lines.append(f"| {row.name} | {row.feature_count} | {train} | {test} |")
    lines.append("")
    return "\n".join(lines)


def _float_cell(value: float) -> str:
    return repr(float(value))


def _render_csv(report: AccuracyReport) -> str:
    classes = report.class_labels
    header = ["methods", "feature_count", "train_accuracy", "test_accuracy",
              "regularization_used", "error"]
    header += [f"train_acc.{c}" for c in classes]
    header += [f"test_acc.{c}" for c in classes]
    header += [f"confusion.{t}.{p}" for t in classes for p in classes]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in report.rows:
        record = [
            "+".join(row.methods),
            str(row.feature_count),
            _float_cell(row.train_accuracy),
            _float_cell(row.test_accuracy),
            _float_cell(row.regularization_used),
            row.error or "",
        ]
        record += [_float_cell(row.per_class_train.get(c, math.nan)) for c in classes]
        record += [_float_cell(row.per_class_test.get(c, math.nan)) for c in classes]
        record += [str(int(v)) for v in row.confusion.ravel()]
        writer.writerow(record)
    return out.getvalue()


def parse_report_csv(text: str) -> AccuracyReport:
    """Rebuild an :class:`AccuracyReport` from its CSV rendering."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    classes = tuple(
        col[len("train_acc.") :] for col in header if col.startswith("train_acc.")
    )
    n = len(classes)
    rows = []
    for record in reader:
        values = dict(zip(header, record))
        confusion = np.array(
            [int(values[f"confusion.{t}.{p}"]) for t in classes for p in classes],
            dtype=np.int64,
        ).reshape(n, n)
        rows.append(
            CombinationResult(
                tuple(values["methods"].split("+")),
                int(values["feature_count"]),
                float(values["train_accuracy"]),
                float(values["test_accuracy"]),
                {c: float(values[f"train_acc.{c}"]) for c in classes},
                {c: float(values[f"test_acc.{c}"]) for c in classes},
                confusion,
                float(values["regularization_used"]),
                values["error"] or None,
            )
        )
    return AccuracyReport(classes, tuple(rows))
