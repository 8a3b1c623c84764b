"""Command-line surface: run one evaluation, compare saved reports."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from .harness import EvalConfig, MetricReport, evaluate
from .metrics import METRIC_NAMES
from .tables import compare_table


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def report_to_json(report: MetricReport, cfg: EvalConfig) -> str:
    payload = {
        "dataset": report.dataset,
        "means": report.means(),
        "per_fold": {name: list(v) for name, v in report.per_fold.items()},
        "config": asdict(cfg),
    }
    return json.dumps(payload, indent=2)


def report_from_json(path) -> MetricReport:
    payload = json.loads(Path(path).read_text())
    per_fold = {name: tuple(payload["per_fold"][name]) for name in METRIC_NAMES}
    return MetricReport.from_folds(payload["dataset"], per_fold)


def cmd_run(args) -> int:
    cfg = EvalConfig(folds=args.folds, seeds=args.seeds, workers=args.workers)
    if args.fast:
        cfg = cfg.fast()
    report = evaluate(args.features, args.labels, cfg, dataset=args.dataset)
    text = report_to_json(report, cfg)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_compare(args) -> int:
    reports = [report_from_json(path) for path in args.reports]
    table = compare_table(reports, args.names, metric=args.metric)
    print(table.text)
    if args.csv_out:
        Path(args.csv_out).write_text(table.csv)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evalharness", description="cross-validated GBDT feature evaluation"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate one feature/label CSV pair")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--dataset", default="")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seeds", type=_int_list, default=(0, 1, 2))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--fast", action="store_true", help="200-estimator profile")
    p.add_argument("--out", default=None, help="write the JSON report here too")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="tabulate saved JSON reports")
    p.add_argument("--reports", nargs="+", required=True)
    p.add_argument("--names", nargs="+", required=True)
    p.add_argument("--metric", choices=list(METRIC_NAMES), default="macro_f1")
    p.add_argument("--csv-out", default=None)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
