"""Similarity report output: CSV, console table, and figure rendering.

The CSV starts with comment lines recording the comparison semantics (set
comparison, tie-breaking) so a report is interpretable on its own. An
``average`` row (plain mean of the data rows) is appended to both outputs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from usagekit.metrics.similarity import SimilarityRow

CSV_COLUMNS = (
    "test_id",
    "closest_human_id",
    "precision_states",
    "precision_transitions",
    "recall_states",
    "recall_transitions",
)

HEADER_NOTES = (
    "# similarity over canonical sets; transition identity = (from, widget, action, to)",
    "# closest human maximizes (precision_states + precision_transitions) / 2; ties to lower id",
)

METRIC_FIELDS = (
    "precision_states",
    "precision_transitions",
    "recall_states",
    "recall_transitions",
)


@dataclass(frozen=True)
class ReportPaths:
    csv_path: Path
    figure_path: Optional[Path]


def _average_row(rows: Sequence[SimilarityRow]) -> Optional[SimilarityRow]:
    if not rows:
        return None
    means = {
        f: sum(getattr(r, f) for r in rows) / len(rows) for f in METRIC_FIELDS
    }
    return SimilarityRow(test_id="average", closest_human_id="-", **means)


def emit_report(
    rows: Sequence[SimilarityRow],
    csv_path: Path | str,
    figure_path: Optional[Path | str] = None,
) -> str:
    """Write rows (+ average) as CSV, optionally render a figure, and return
    a human-readable table of the same content."""
    csv_path = Path(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    output: List[SimilarityRow] = list(rows)
    avg = _average_row(output)
    if avg is not None:
        output.append(avg)

    with open(csv_path, "w", newline="") as fh:
        for note in HEADER_NOTES:
            fh.write(note + "\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in output:
            writer.writerow(
                [r.test_id, r.closest_human_id]
                + [f"{getattr(r, f):.2f}" for f in METRIC_FIELDS]
            )

    if figure_path is not None and output:
        _render_figure(output, Path(figure_path))

    widths = [max(len(c), 8) for c in CSV_COLUMNS]
    lines = ["  ".join(c.ljust(w) for c, w in zip(CSV_COLUMNS, widths))]
    for r in output:
        cells = [r.test_id, r.closest_human_id] + [
            f"{getattr(r, f):.2f}" for f in METRIC_FIELDS
        ]
        lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
    return "\n".join(lines)


def _render_figure(rows: Sequence[SimilarityRow], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    labels = [r.test_id for r in rows]
    x = range(len(rows))
    width = 0.2
    fig, ax = plt.subplots(figsize=(max(6.0, 0.9 * len(rows)), 4.0))
    for offset, fname in enumerate(METRIC_FIELDS):
        values = [getattr(r, fname) for r in rows]
        ax.bar(
            [i + (offset - 1.5) * width for i in x],
            values,
            width=width,
            label=fname.replace("_", " "),
        )
    ax.set_xticks(list(x))
    ax.set_xticklabels(labels, rotation=45, ha="right")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("fraction")
    ax.set_title("similarity to closest human trace")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
