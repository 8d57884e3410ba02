"""Command-line entry point: ``fairmit <command> ...``.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 configuration
error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from dataclasses import fields, replace
from pathlib import Path

from ..core import confusion_from_scores
from ..errors import ConfigError, FairmitError, InputError, TrainingDiverged
from ..metrics import metric_report
from ..mitigate import ThresholdStrategy, class_weights, optimize_threshold
from .config import read_config
from .experiment import configs_from_mapping, run_all
from .io import load_scores, write_dataset
from .plotting import plot_histories, plot_metrics
from .report import emit_report, read_report_csv, render_cells, render_row
from .synthetic import SyntheticSpec, generate_synthetic

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2, 3


def _write_pairs(pairs):
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["metric", "value"])
    for k, v in pairs:
        w.writerow([k, v])


def _report_pairs(rep):
    return [(k, repr(v) if isinstance(v, float) else v) for k, v in rep.as_dict().items()]


def cmd_evaluate(args):
    records = load_scores(args.scores)
    rep = metric_report(confusion_from_scores(records, args.threshold))
    _write_pairs([("threshold", repr(args.threshold))] + _report_pairs(rep))


def cmd_threshold(args):
    records = load_scores(args.scores)
    res = optimize_threshold(records, ThresholdStrategy.parse(args.strategy))
    _write_pairs([
        ("strategy", res.strategy.value),
        ("t_star", repr(res.t_star)),
        ("objective", repr(res.objective_value)),
        ("candidates_evaluated", res.candidates_evaluated),
    ] + _report_pairs(res.report))


def cmd_reweight(args):
    w = class_weights(args.male, args.female)
    _write_pairs([("w_male", repr(w.w_male)), ("w_female", repr(w.w_female))])


def cmd_synth(args):
    conf = read_config(args.spec) if args.spec else {}
    known = {f.name for f in fields(SyntheticSpec)}
    values = {}
    for key, raw in conf.items():
        name = key.split(".", 1)[1] if key.startswith("synthetic.") else key
        if name not in known:
            raise ConfigError(f"unknown synthetic spec key '{key}'")
        values[name] = raw
    mapping = {f"synthetic.{k}": v for k, v in values.items()}
    spec = configs_from_mapping(mapping)[0].synthetic
    source, target = generate_synthetic(spec)
    out = Path(args.out)
    write_dataset(source, out / "source")
    write_dataset(target, out / "target")
    n_male, n_female = target.class_counts()
    print(f"source,{len(source)}\ntarget,{len(target)}\ntarget_female,{n_female}\ntarget_male,{n_male}")


def _report_format(path: Path) -> str:
    return "markdown" if path.suffix.lower() in (".md", ".markdown") else "csv"


def cmd_experiment(args):
    configs = configs_from_mapping(read_config(args.config))
    rows = run_all(configs)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    text = emit_report(rows, _report_format(out), out)
    if not args.no_figures:
        plot_metrics([render_row(r) for r in rows], out.with_suffix(".metrics.png"))
        plot_histories(rows, out.with_suffix(".curves.png"))
    sys.stdout.write(text)


def cmd_report(args):
    cells = read_report_csv(args.input)
    text = render_cells(cells, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.figure:
        plot_metrics(cells, args.figure)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fairmit", description="Fairness metrics and bias mitigation for binary classifiers.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("evaluate", help="metrics for a score file")
    s.add_argument("--scores", required=True)
    s.add_argument("--threshold", type=float, default=0.5)
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("threshold", help="fit a fairness threshold to a score file")
    s.add_argument("--scores", required=True)
    s.add_argument("--strategy", required=True, choices=[st.value for st in ThresholdStrategy])
    s.set_defaults(func=cmd_threshold)

    s = sub.add_parser("reweight", help="balanced class weights")
    s.add_argument("--male", type=int, required=True)
    s.add_argument("--female", type=int, required=True)
    s.set_defaults(func=cmd_reweight)

    s = sub.add_parser("synth", help="write synthetic source/target datasets")
    s.add_argument("--spec", help="key = value file with synthetic settings")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("experiment", help="run experiments from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="report path; .md for markdown, otherwise CSV")
    s.add_argument("--no-figures", action="store_true")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("report", help="re-render a results CSV")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--format", default="markdown", choices=["csv", "markdown"])
    s.add_argument("--out")
    s.add_argument("--figure", help="also write a metrics figure (PNG)")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingDiverged as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, FairmitError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
