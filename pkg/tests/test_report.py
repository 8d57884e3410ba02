import csv
import io

import pytest

from fairmit.core import ConfusionCounts
from fairmit.errors import InputError
from fairmit.harness.experiment import ResultRow
from fairmit.harness.report import (
    HEADER,
    emit_report,
    fmt_accuracy,
    fmt_dpd,
    fmt_rate,
    parse_cell,
    read_report_csv,
    render_row,
)
from fairmit.metrics import metric_report
from fairmit.mitigate import ThresholdStrategy


def row_from_counts(cc, **kw):
    rep = metric_report(cc)
    metrics = {m: (getattr(rep, m), None) for m in ("accuracy", "dpd", "ppd", "eood", "prpd")}
    return ResultRow(model_tag="Xception", transfer=False, threshold=None, reweighting=False,
                     augmentation=False, metrics=metrics, n_eval=cc.total, **kw)


def test_degenerate_rows_render_like_table():
    a = render_row(row_from_counts(ConfusionCounts(0, 0, 258, 234)))
    b = render_row(row_from_counts(ConfusionCounts(234, 258, 0, 0)))
    assert a[5:10] == ["52.4%", "-492", "-1", "-1", "-0.524"]
    assert b[5:10] == ["47.6%", "492", "1", "1", "0.476"]


@pytest.mark.parametrize("fn,args,out", [
    (fmt_accuracy, (0.785, 0.012), "78.5 +/- 1.2%"),
    (fmt_accuracy, (0.821,), "82.1%"),
    (fmt_dpd, (-39.0, 54.6), "-39 +/- 54.6"),
    (fmt_dpd, (-13.4, 48.2), "-13.4 +/- 48.2"),
    (fmt_dpd, (0,), "0"),
    (fmt_rate, (-0.04, 0.06), "-0.04 +/- 0.06"),
    (fmt_rate, (0.0,), "0"),
    (fmt_rate, (-0.0001,), "0"),
    (fmt_rate, (0.008,), "0.008"),
])
def test_formatters(fn, args, out):
    assert fn(*args) == out


def test_csv_one_row():
    text = emit_report([row_from_counts(ConfusionCounts(5, 1, 4, 2))], "csv")
    lines = text.strip().split("\n")
    assert len(lines) == 2 and lines[0].startswith("Network,Transfer learning")


def test_markdown_and_csv_share_numbers():
    rows = [row_from_counts(ConfusionCounts(0, 0, 258, 234)),
            row_from_counts(ConfusionCounts(30, 10, 20, 15)),
            ResultRow("MLP", True, ThresholdStrategy.EQUAL_OPPORTUNITY, True, True,
                      {"accuracy": (0.8, 0.02), "dpd": (-12.4, 3.3), "ppd": (-0.1, 0.03),
                       "eood": (0.05, 0.01), "prpd": (0.0, 0.0)}, 100)]
    csv_cells = list(csv.reader(io.StringIO(emit_report(rows, "csv"))))[1:]
    md = emit_report(rows, "markdown").strip().split("\n")[2:]
    md_cells = [[c.strip() for c in line.strip("|").split("|")] for line in md]
    assert csv_cells == md_cells


def test_empty_rows_rejected():
    with pytest.raises(InputError):
        emit_report([], "csv")


def test_report_csv_roundtrip(tmp_path):
    rows = [row_from_counts(ConfusionCounts(0, 0, 258, 234))]
    emit_report(rows, "csv", tmp_path / "r.csv")
    cells = read_report_csv(tmp_path / "r.csv")
    assert cells == [render_row(rows[0])]


def test_parse_cell():
    assert parse_cell("52.4%") == pytest.approx((0.524, None))
    m, s = parse_cell("78.5 +/- 1.2%")
    assert (m, s) == pytest.approx((0.785, 0.012))
    assert parse_cell("-13.4 +/- 48.2") == (-13.4, 48.2)
    with pytest.raises(InputError):
        parse_cell("n/a")


def test_header_order():
    assert HEADER[5:10] == ("Accuracy", "Demographic Parity Difference", "Proportional Parity Difference",
                            "Equality of Opportunity", "Predictive Rate Parity Difference")
