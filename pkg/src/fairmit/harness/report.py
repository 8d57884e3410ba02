"""Table rendering for result rows (CSV and markdown).

Numbers are formatted the way the published results table prints them:
accuracy as a percentage with one decimal, the demographic parity difference
as a whole count, the other three metrics with up to three decimals and
trailing zeros dropped; spreads render as ``m +/- s``.
"""
from __future__ import annotations

import csv
import io
import re
from pathlib import Path

from ..errors import InputError
from ..mitigate import ThresholdStrategy
from .experiment import ResultRow

HEADER = (
    "Network",
    "Transfer learning",
    "Threshold change",
    "Reweighting",
    "Image augmentation",
    "Accuracy",
    "Demographic Parity Difference",
    "Proportional Parity Difference",
    "Equality of Opportunity",
    "Predictive Rate Parity Difference",
    "N eval",
)

STRATEGY_LABELS = {
    ThresholdStrategy.EQUAL_TRUE: "Equal true",
    ThresholdStrategy.EQUAL_FALSE: "Equal false",
    ThresholdStrategy.EQUAL_TOTAL: "Equal total",
    ThresholdStrategy.EQUAL_OPPORTUNITY: "Equal opp.",
}


def _trim(text: str) -> str:
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text


def fmt_fixed(x: float, decimals: int) -> str:
    return _trim(f"{x:.{decimals}f}")


def fmt_accuracy(mean: float, std=None) -> str:
    if std is None:
        return f"{100 * mean:.1f}%"
    return f"{100 * mean:.1f} +/- {100 * std:.1f}%"


def fmt_dpd(mean, std=None) -> str:
    if std is None:
        return str(int(round(mean)))
    return f"{fmt_fixed(mean, 1)} +/- {fmt_fixed(std, 1)}"


def fmt_rate(mean: float, std=None) -> str:
    if std is None:
        return fmt_fixed(mean, 3)
    return f"{fmt_fixed(mean, 3)} +/- {fmt_fixed(std, 3)}"


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


def render_row(row: ResultRow) -> list[str]:
    m = row.metrics
    return [
        row.model_tag,
        _yes_no(row.transfer),
        STRATEGY_LABELS[row.threshold] if row.threshold else "No",
        _yes_no(row.reweighting),
        _yes_no(row.augmentation),
        fmt_accuracy(*m["accuracy"]),
        fmt_dpd(*m["dpd"]),
        fmt_rate(*m["ppd"]),
        fmt_rate(*m["eood"]),
        fmt_rate(*m["prpd"]),
        fmt_fixed(row.n_eval, 1),
    ]


def to_csv(cells: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    w.writerows(cells)
    return buf.getvalue()


def to_markdown(cells: list[list[str]]) -> str:
    lines = ["| " + " | ".join(HEADER) + " |", "|" + "|".join("---" for _ in HEADER) + "|"]
    lines += ["| " + " | ".join(c) + " |" for c in cells]
    return "\n".join(lines) + "\n"


def render_cells(cells: list[list[str]], fmt: str) -> str:
    fmt = fmt.lower()
    if fmt == "csv":
        return to_csv(cells)
    if fmt in ("markdown", "md"):
        return to_markdown(cells)
    raise InputError(f"unknown report format {fmt!r}; expected csv or markdown")


def emit_report(rows: list[ResultRow], fmt: str = "csv", path=None) -> str:
    """Render rows in Table order; also write to ``path`` when given."""
    if not rows:
        raise InputError("no result rows to report")
    text = render_cells([render_row(r) for r in rows], fmt)
    if path is not None:
        Path(path).write_text(text)
    return text


def read_report_csv(path) -> list[list[str]]:
    path = Path(path)
    if not path.exists():
        raise InputError(f"{path}: no such file")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != HEADER:
            raise InputError(f"{path}:1: not a results CSV (unexpected header)")
        cells = [row for row in reader if row]
    if not cells:
        raise InputError(f"{path}: no result rows")
    return cells


_NUM = re.compile(r"^\s*(-?\d+(?:\.\d+)?)%?(?:\s*\+/-\s*(\d+(?:\.\d+)?)%?)?\s*$")


def parse_cell(text: str) -> tuple[float, float | None]:
    """Inverse of the formatters, up to rounding: ``'52.4%'`` -> (0.524, None)."""
    match = _NUM.match(text)
    if not match:
        raise InputError(f"cannot parse numeric cell {text!r}")
    scale = 0.01 if "%" in text else 1.0
    mean = float(match.group(1)) * scale
    std = float(match.group(2)) * scale if match.group(2) is not None else None
    return mean, std
