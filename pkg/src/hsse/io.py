"""Dataset ingestion and feature serialization.

Feature CSVs render doubles with shortest round-trip decimal notation, so
write followed by reload reproduces values bitwise.  A plain-text sidecar
records the effective configuration; rerunning from the sidecar alone
reproduces the feature file.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .embed import ExpressionMatrix
from .features import FeatureMatrix, PipelineConfig


def _parse_float(token: str, path, line_no: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(
            f"{path}:{line_no}: non-numeric entry {token!r}"
        ) from None
    if not np.isfinite(value):
        raise ValueError(f"{path}:{line_no}: non-finite entry {token!r}")
    return value


def _read_delimited(path) -> tuple[list, list, list]:
    """Returns (row_ids, col_ids, rows) from a CSV/TSV with one header row
    and one id column."""
    path = Path(path)
    delimiter = "\t" if path.suffix.lower() in (".tsv", ".tab") else ","
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        col_ids = [c.strip() for c in header[1:]]
        row_ids, rows = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(col_ids) + 1:
                raise ValueError(
                    f"{path}:{line_no}: expected {len(col_ids) + 1} fields, "
                    f"got {len(record)}"
                )
            row_ids.append(record[0].strip())
            rows.append([_parse_float(tok, path, line_no) for tok in record[1:]])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return row_ids, col_ids, rows


def _read_matrix_market(path) -> tuple[list, np.ndarray]:
    """MatrixMarket coordinate file plus an ``<path>.ids`` sidecar listing
    one row identifier per line."""
    from scipy.io import mmread

    path = Path(path)
    ids_path = Path(str(path) + ".ids")
    if not ids_path.exists():
        raise FileNotFoundError(f"missing id sidecar {ids_path}")
    matrix = np.asarray(mmread(path).todense(), dtype=float)
    ids = [line.strip() for line in ids_path.read_text().splitlines() if line.strip()]
    if len(ids) != matrix.shape[0]:
        raise ValueError(
            f"{ids_path}: {len(ids)} ids for {matrix.shape[0]} matrix rows"
        )
    return ids, matrix


def load_expression(path, layout: str = "cells_x_genes") -> ExpressionMatrix:
    """Load a cells-by-genes matrix from CSV/TSV or MatrixMarket.

    ``layout`` names the orientation of the file; the result is always
    cells x genes with cell ids in file order.
    """
    if layout not in ("cells_x_genes", "genes_x_cells"):
        raise ValueError(f"unknown layout {layout!r}")
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    if path.suffix.lower() == ".mtx":
        row_ids, values = _read_matrix_market(path)
        col_ids = None
    else:
        row_ids, col_ids, rows = _read_delimited(path)
        values = np.asarray(rows, dtype=float)
    if layout == "genes_x_cells":
        values = values.T
        cell_ids = col_ids if col_ids is not None else [
            str(i) for i in range(values.shape[0])
        ]
    else:
        cell_ids = row_ids
    return ExpressionMatrix(values, list(cell_ids))


def load_labels(path, cell_ids) -> list[str]:
    """Load a two-column ``cell_id,label`` CSV aligned to ``cell_ids``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"label file not found: {path}")
    mapping: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, record in enumerate(reader, start=1):
            if not record:
                continue
            if len(record) != 2:
                raise ValueError(f"{path}:{line_no}: expected 2 fields, got {len(record)}")
            cid, label = record[0].strip(), record[1].strip()
            if line_no == 1 and cid == "cell_id":
                continue
            if cid in mapping:
                raise ValueError(f"{path}: duplicate cell id {cid!r}")
            mapping[cid] = label
    missing = [cid for cid in cell_ids if cid not in mapping]
    if missing:
        raise ValueError(f"{path}: missing label for cell id {missing[0]!r}")
    return [mapping[cid] for cid in cell_ids]


def write_features(fm: FeatureMatrix, path) -> None:
    """Write the feature matrix as CSV with round-trip-exact doubles."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cell_id", *fm.columns])
        for cid, row in zip(fm.cell_ids, fm.values):
            writer.writerow([cid, *(repr(v) for v in row.tolist())])


def read_features(path) -> FeatureMatrix:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = header[1:]
        cell_ids, rows = [], []
        for record in reader:
            if not record:
                continue
            cell_ids.append(record[0])
            rows.append([float(tok) for tok in record[1:]])
    return FeatureMatrix(cell_ids, columns, np.asarray(rows, dtype=float))


def write_sidecar(path, cfg: PipelineConfig, timings: dict, provider_detail="") -> None:
    """Plain-text metadata next to a feature file: config, provider,
    version and per-stage wall clock."""
    from . import __version__

    lines = [f"version = {__version__}"]
    for name in (
        "scales",
        "k_sizes",
        "segments",
        "alpha",
        "metric",
        "degrees",
        "nonzero_only",
        "embedding_provider",
        "workers",
        "eta_override",
    ):
        value = getattr(cfg, name)
        if isinstance(value, tuple):
            value = ",".join(str(v) for v in value)
        lines.append(f"{name} = {value}")
    if provider_detail:
        lines.append(f"provider_detail = {provider_detail}")
    for stage, seconds in timings.items():
        lines.append(f"{stage} = {seconds:.3f}")
    Path(path).write_text("\n".join(lines) + "\n")
