"""Static report figures, rendered straight to image files."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import AccuracyReport, CombinationResult

__all__ = ["save_accuracy_chart", "save_confusion_heatmap", "save_report_figures"]


def save_accuracy_chart(report: AccuracyReport, path: str | Path) -> None:
    """Horizontal bar chart of train/test accuracy per combination."""
    rows = [r for r in report.rows if r.error is None]
    names = [r.name for r in rows][::-1]
    train = [r.train_accuracy * 100 for r in rows][::-1]
    test = [r.test_accuracy * 100 for r in rows][::-1]
    y = np.arange(len(names))
    fig, ax = plt.subplots(figsize=(8, max(3, 0.4 * len(names) + 1)))
    ax.barh(y + 0.2, train, height=0.4, label="train", color="#9ecae1")
    ax.barh(y - 0.2, test, height=0.4, label="test", color="#3182bd")
    ax.set_yticks(y)
    ax.set_yticklabels(names)
    ax.set_xlabel("accuracy [%]")
    ax.set_xlim(0, 100)
    ax.legend(loc="lower right")
    ax.set_title("Classification accuracy by feature combination")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_confusion_heatmap(
    row: CombinationResult, class_labels: tuple[str, ...], path: str | Path
) -> None:
    """Annotated heatmap of one combination's test confusion matrix."""
    matrix = row.confusion
    n = len(class_labels)
    fig, ax = plt.subplots(figsize=(1 + 0.7 * n, 1 + 0.7 * n))
    ax.imshow(matrix, cmap="Blues")
    ax.set_xticks(range(n))
    ax.set_yticks(range(n))
    ax.set_xticklabels(class_labels, rotation=45, ha="right")
    ax.set_yticklabels(class_labels)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    threshold = matrix.max() / 2 if matrix.max() else 0.5
    for i in range(n):
        for j in range(n):
            ax.text(
                j, i, str(int(matrix[i, j])),
                ha="center", va="center",
                color="white" if matrix[i, j] > threshold else "black",
                fontsize=8,
            )
    ax.set_title(f"Test confusion: {row.name}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_report_figures(report: AccuracyReport, directory: str | Path) -> list[Path]:
    """Accuracy chart plus confusion heatmap of the best combination."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    chart = out / "accuracy.png"
    save_accuracy_chart(report, chart)
    written.append(chart)
    best = next((r for r in report.rows if r.error is None and not math.isnan(r.test_accuracy)), None)
    if best is not None:
        slug = "_".join(best.methods)
        heatmap = out / f"confusion_{slug}.png"
        save_confusion_heatmap(best, report.class_labels, heatmap)
        written.append(heatmap)
    return written
