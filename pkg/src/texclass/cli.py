"""Command-line interface.

Subcommands cover each pipeline stage: ``segment`` cuts images into
window files, ``extract`` turns segments into per-method feature CSVs,
``train`` fits the Gaussian classifier, ``classify`` scores feature rows,
``experiment`` runs the full combination sweep from a config file, and
``report`` re-renders stored results as markdown/CSV plus figures.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import bayes, fractal, harness
from .imaging import load_segments, save_pgm, save_segments


def _segment_id(label: str, origin: tuple[int, int]) -> str:
    return f"{label}:{origin[0]}:{origin[1]}"


def cmd_segment(args) -> int:
    cfg = harness.parse_config(args.config)
    segments = harness.build_segments(cfg)
    manifest = save_segments(segments, args.out)
    print(f"wrote {len(segments)} segments and {manifest}")
    return 0


def cmd_extract(args) -> int:
    cfg = harness.parse_config(args.config) if args.config else harness.ExperimentConfig(images=())
    segments = load_segments(args.segments)
    methods = tuple(args.methods.split(",")) if args.methods else cfg.methods
    datasets = harness.extract_all(segments, methods, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for method, dataset in datasets.items():
        path = out / f"features_{method}.csv"
        _write_feature_csv(path, dataset, segments)
        print(f"wrote {path} ({dataset.features.shape[0]} rows x {dataset.n_features} features)")
        if dataset.degenerate_count:
            print(f"  warning: {dataset.degenerate_count} degenerate segments mapped to zero vectors")
    if args.fd_dump:
        dump = Path(args.fd_dump)
        dump.mkdir(parents=True, exist_ok=True)
        for seg in segments:
            fd = fractal.fd_image(seg.pixels, cfg.fbm)
            name = f"fd_{seg.label}_{seg.origin[0]:04d}_{seg.origin[1]:04d}.pgm"
            save_pgm(fractal.fd_image_gray(fd), dump / name)
        print(f"wrote {len(segments)} FD images to {dump}")
    return 0


def _write_feature_csv(path, dataset, segments) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["segment_id", "class", "split", *dataset.feature_names])
        for seg, row in zip(segments, dataset.features):
            writer.writerow(
                [_segment_id(seg.label, seg.origin), seg.label, seg.split or ""]
                + [repr(float(v)) for v in row]
            )


def _read_feature_csv(path) -> tuple[list[str], bayes.LabeledDataset]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        names = tuple(header[3:])
        ids, labels, split, rows = [], [], [], []
        for record in reader:
            ids.append(record[0])
            labels.append(record[1])
            split.append(record[2])
            rows.append([float(v) for v in record[3:]])
    dataset = bayes.LabeledDataset(np.array(rows), np.array(labels), np.array(split), names)
    return ids, dataset


def _load_combined(paths: list[str]) -> tuple[list[str], bayes.LabeledDataset]:
    ids = None
    datasets = []
    for path in paths:
        row_ids, dataset = _read_feature_csv(path)
        if ids is None:
            ids = row_ids
        elif row_ids != ids:
            raise SystemExit(f"feature files disagree on segment rows: {path}")
        datasets.append(dataset)
    return ids, harness.combine_features(datasets)


def cmd_train(args) -> int:
    _, dataset = _load_combined(args.features)
    train = bayes.subset(dataset, "train") if "train" in dataset.split else dataset
    models = bayes.fit(train, ridge=args.ridge, diagonal=args.diagonal)
    bayes.save_models(models, args.out)
    regs = [m.regularization_used for m in models if m.regularization_used > 0]
    note = f" ({len(regs)} classes ridge-regularized)" if regs else ""
    print(f"wrote {args.out} with {len(models)} class models{note}")
    return 0


def cmd_classify(args) -> int:
    models = bayes.load_models(args.model)
    ids, dataset = _load_combined(args.features)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["segment_id", "class", "predicted", "correct"])
        correct = 0
        for seg_id, row, truth in zip(ids, dataset.features, dataset.labels):
            predicted, _ = bayes.classify(models, row)
            hit = int(predicted == truth)
            correct += hit
            writer.writerow([seg_id, truth, predicted, hit])
    total = len(ids)
    print(f"wrote {args.out}: {correct}/{total} correct ({100 * correct / total:.2f}%)")
    return 0


def cmd_experiment(args) -> int:
    cfg = harness.parse_config(args.config)
    report = harness.run_experiment(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.csv").write_text(harness.render_report(report, "csv"))
    (out / "report.md").write_text(harness.render_report(report, "markdown"))
    written = [out / "report.csv", out / "report.md"]
    if not args.no_figures:
        from .plots import save_report_figures

        written += save_report_figures(report, out)
    for path in written:
        print(f"wrote {path}")
    best = report.rows[0]
    if best.error is None:
        print(f"best: {best.name} with test accuracy {best.test_accuracy * 100:.2f}%")
    return 0


def cmd_report(args) -> int:
    report = harness.parse_report_csv(Path(args.input).read_text())
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.format in ("markdown", "both"):
        (out / "report.md").write_text(harness.render_report(report, "markdown"))
        written.append(out / "report.md")
    if args.format in ("csv", "both"):
        (out / "report.csv").write_text(harness.render_report(report, "csv"))
        written.append(out / "report.csv")
    if not args.no_figures:
        from .plots import save_report_figures

        written += save_report_figures(report, out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texclass", description="Texture feature extraction and classification"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="cut images into overlapping segment files")
    p.add_argument("config", help="experiment config file (flat key = value)")
    p.add_argument("--out", required=True, help="output directory for PGMs + manifest.csv")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("extract", help="extract feature CSVs from a segment directory")
    p.add_argument("segments", help="segment directory written by 'segment'")
    p.add_argument("--out", required=True, help="output directory for feature CSVs")
    p.add_argument("--config", help="config file for extractor parameters")
    p.add_argument("--methods", help="comma-separated subset (default: all)")
    p.add_argument("--fd-dump", help="also dump per-segment FD images as PGMs here")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit the Gaussian classifier from feature CSVs")
    p.add_argument("features", nargs="+", help="feature CSV(s); columns are concatenated")
    p.add_argument("--out", required=True, help="model file to write")
    p.add_argument("--ridge", type=float, default=1e-6)
    p.add_argument("--diagonal", action="store_true", help="diagonal covariance mode")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="predict classes for feature rows")
    p.add_argument("features", nargs="+", help="feature CSV(s); columns are concatenated")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True, help="predictions CSV to write")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("experiment", help="run the full combination sweep")
    p.add_argument("config", help="experiment config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("report", help="re-render a stored report.csv")
    p.add_argument("input", help="report.csv from a previous run")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--format", choices=["markdown", "csv", "both"], default="both")
    p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
