"""Per-dataset, per-method comparison tables.

Rows are datasets, columns are methods; the best score in each row is
bold-marked (``**value**``) in the plain-text rendering, with ties all
marked.  A CSV rendering carries the raw numbers.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Sequence

from .harness import MetricReport
from .metrics import METRIC_NAMES


@dataclass(frozen=True)
class ComparisonTable:
    metric: str
    datasets: tuple[str, ...]
    names: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]  # [dataset][method]
    text: str
    csv: str


def _normalize(reports) -> list[dict[str, MetricReport]]:
    """One {dataset: report} mapping per method; single reports allowed."""
    methods = []
    for entry in reports:
        if isinstance(entry, MetricReport):
            entry = [entry]
        by_dataset = {}
        for report in entry:
            if report.dataset in by_dataset:
                raise ValueError(f"duplicate dataset {report.dataset!r} in one method")
            by_dataset[report.dataset] = report
        methods.append(by_dataset)
    return methods


def compare_table(reports: Sequence, names: Sequence[str], metric: str = "macro_f1") -> ComparisonTable:
    """Build the comparison table for one metric across methods.

    ``reports`` holds one entry per method: a single MetricReport or a list
    of them (one per dataset).  All methods must cover the same datasets.
    """
    if metric not in METRIC_NAMES:
        raise ValueError(f"unknown metric {metric!r}")
    reports = list(reports)
    names = list(names)
    if not reports:
        raise ValueError("no reports to compare")
    if len(reports) != len(names):
        raise ValueError(f"{len(reports)} report sets for {len(names)} names")
    methods = _normalize(reports)
    datasets = sorted(methods[0])
    for name, by_dataset in zip(names, methods):
        if sorted(by_dataset) != datasets:
            raise ValueError(
                f"method {name!r} covers datasets {sorted(by_dataset)}, "
                f"expected {datasets}"
            )

    scores = tuple(
        tuple(getattr(by_dataset[ds], metric) for by_dataset in methods)
        for ds in datasets
    )

    cells = []
    for row in scores:
        best = max(row)
        cells.append(
            [f"**{v:.3f}**" if v == best else f"{v:.3f}" for v in row]
        )
    widths = [
        max(len("dataset"), *(len(ds) for ds in datasets)),
        *(
            max(len(names[j]), *(len(cells[i][j]) for i in range(len(datasets))))
            for j in range(len(names))
        ),
    ]
    header = ["dataset", *names]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for ds, row in zip(datasets, cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip([ds, *row], widths)))
    text = "\n".join(lines)

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["dataset", *names])
    for ds, row in zip(datasets, scores):
        writer.writerow([ds, *(repr(v) for v in row)])

    return ComparisonTable(
        metric=metric,
        datasets=tuple(datasets),
        names=tuple(names),
        scores=scores,
        text=text,
        csv=buffer.getvalue(),
    )
