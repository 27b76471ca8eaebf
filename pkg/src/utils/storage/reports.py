"""
Report emission: JSON records, curve CSVs and SVG line charts.
"""

import csv
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..logging_utils import LogCategory, get_category_logger  # noqa: E402
from ..metrics import CalibrationReport, SweepResult  # noqa: E402

logger = get_category_logger(LogCategory.IO)

CURVE_COLUMNS = ("threshold", "precision", "recall", "tpr", "fpr")


def _to_jsonable(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    if hasattr(value, "to_record"):
        return value.to_record()
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(record: Any, path: Union[str, Path]) -> Path:
    """Write record with sorted keys; numpy values, enums and report objects are converted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(record, indent=2, sort_keys=True, default=_to_jsonable), encoding="utf-8"
    )
    return path


def write_curve_csv(result: SweepResult, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=CURVE_COLUMNS)
        writer.writeheader()
        writer.writerows(result.rows())
    return path


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    # fixed hash salt keeps SVG element ids stable between runs
    with matplotlib.rc_context({"svg.hashsalt": "logicmon"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_curves_svg(
    result: SweepResult, directory: Union[str, Path], prefix: str = "", title: Optional[str] = None
) -> Dict[str, Path]:
    """PR, ROC and F-score-by-threshold charts; returns the written files by curve name."""
    directory = Path(directory)
    title = title or "sweep"
    written = {}

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(result.recall, result.precision)
    ax.set(xlabel="recall", ylabel="precision", xlim=(0, 1), ylim=(0, 1.02), title=f"{title}: PR")
    written["pr"] = _save(fig, directory / f"{prefix}pr.svg")

    fig, ax = plt.subplots(figsize=(5, 5))
    label = f"AUC {result.auc_roc:.3f}" if result.auc_defined else None
    ax.plot(result.fpr, result.recall, label=label)
    ax.plot([0, 1], [0, 1], linestyle=":", color="grey")
    ax.set(xlabel="FPR", ylabel="TPR", xlim=(0, 1), ylim=(0, 1.02), title=f"{title}: ROC")
    if result.auc_defined:
        ax.legend(loc="lower right")
    written["roc"] = _save(fig, directory / f"{prefix}roc.svg")

    fig, ax = plt.subplots(figsize=(6, 4))
    for key, values in result.f_scores.items():
        ax.plot(result.thresholds, values, label=key.upper())
    ax.set(
        xlabel="threshold",
        ylabel="score",
        xlim=(0, 1),
        ylim=(0, 1.02),
        title=f"{title}: F by threshold",
    )
    ax.legend(loc="best")
    written["f_by_threshold"] = _save(fig, directory / f"{prefix}f_by_threshold.svg")

    logger.debug("Wrote {} curve plots to {}".format(len(written), directory))
    return written


def plot_reliability_svg(
    report: CalibrationReport, path: Union[str, Path], title: Optional[str] = None
) -> Path:
    """Reliability diagram: per-bin accuracy against confidence, empty bins left out."""
    centers = 0.5 * (report.bin_edges[:-1] + report.bin_edges[1:])
    filled = report.counts > 0
    width = report.bin_edges[1] - report.bin_edges[0]

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.bar(
        centers[filled], report.accuracy[filled], width=width, edgecolor="black", label="accuracy"
    )
    ax.plot([0, 1], [0, 1], linestyle=":", color="grey")
    ax.set(
        xlabel="confidence",
        ylabel="accuracy",
        xlim=(0, 1),
        ylim=(0, 1),
        title=f"{title or 'reliability'}: ECE {report.ece:.4f}, MCE {report.mce:.4f}",
    )
    ax.legend(loc="upper left")
    return _save(fig, Path(path))


def comparison_table(rows: List[Dict[str, Any]], columns: List[str]) -> str:
    """Fixed-width text table, one row per record."""
    widths = [max([len(c)] + [len(_cell(r.get(c))) for r in rows]) for c in columns]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(_cell(row.get(c)).ljust(w) for c, w in zip(columns, widths)))
    return "\n".join(lines)


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return "-" if value is None else str(value)
