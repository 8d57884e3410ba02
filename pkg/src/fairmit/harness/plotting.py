"""Figures written next to the tabular reports."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .report import HEADER, parse_cell, render_row  # noqa: E402

FAIRNESS_COLUMNS = (7, 8, 9)  # ppd, eood, prpd: all on the [-1, 1] scale
_STYLE = {
    "figure.dpi": 100,
    "font.size": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "fairmit",
}
# no software/date stamps, so identical inputs give identical bytes
_META = {"Software": None}


def _label(cells: list[str]) -> str:
    flags = [name for name, i in (("TL", 1), ("RW", 3), ("AUG", 4)) if cells[i] == "Yes"]
    if cells[2] != "No":
        flags.append(cells[2])
    return f"{cells[0]} " + ("+".join(flags) if flags else "baseline")


def plot_metrics(cells: list[list[str]], path) -> Path:
    """Grouped bars of the normalized fairness metrics per row, with std error bars."""
    labels = [_label(c) for c in cells]
    x = np.arange(len(cells))
    width = 0.8 / (len(FAIRNESS_COLUMNS) + 1)
    with plt.rc_context(_STYLE):
        fig, (ax_acc, ax) = plt.subplots(2, 1, figsize=(max(6, 0.6 * len(cells) + 2), 6), sharex=True)
        acc = [parse_cell(c[5]) for c in cells]
        ax_acc.bar(x, [100 * m for m, _ in acc], yerr=[100 * (s or 0) for _, s in acc],
                   color="0.6", capsize=2)
        ax_acc.set_ylabel("Accuracy (%)")
        for j, col in enumerate(FAIRNESS_COLUMNS):
            vals = [parse_cell(c[col]) for c in cells]
            ax.bar(x + (j - 1) * width, [m for m, _ in vals], width, yerr=[s or 0 for _, s in vals],
                   capsize=2, label=HEADER[col])
        ax.axhline(0, color="k", lw=0.6)
        ax.set_ylabel("Signed difference")
        ax.set_xticks(x, labels, rotation=60, ha="right")
        ax.legend(frameon=False, fontsize=7)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return path


def plot_histories(rows, path) -> Path:
    """Validation loss per epoch; one line per fold, one panel per row."""
    n = len(rows)
    cols = min(4, n)
    nrows = -(-n // cols)
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(nrows, cols, figsize=(3 * cols, 2.4 * nrows), squeeze=False)
        for ax, row in zip(axes.flat, rows):
            for hist in row.histories:
                ax.plot([e.epoch for e in hist.epochs], hist.val_losses, lw=1)
                ax.plot(hist.best_epoch, hist.epochs[hist.best_epoch].val_loss, "k.", ms=4)
            ax.set_title(_label(render_row(row)), fontsize=7)
            ax.set_xlabel("epoch")
            ax.set_ylabel("val loss")
        for ax in list(axes.flat)[n:]:
            ax.axis("off")
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path, metadata=_META)
        plt.close(fig)
    return path

