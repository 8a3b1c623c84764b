"""Stratified cross-validated GBDT evaluation over feature/label CSVs.

The harness consumes the feature-file contract directly: a CSV whose first
column is ``cell_id`` followed by numeric feature columns, plus a
two-column ``cell_id,label`` CSV.  Folds are a pure function of
(labels, seed); seeds run independently and results are keyed by seed, so
worker count never changes the report.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from sklearn.ensemble import GradientBoostingClassifier
from sklearn.model_selection import StratifiedKFold

from .metrics import METRIC_NAMES, fold_metrics

#: estimator count for the --fast desk-scale profile
FAST_N_ESTIMATORS = 200


@dataclass(frozen=True)
class EvalConfig:
    """Fixed GBDT hyperparameters and the cross-validation protocol.

    The same configuration is applied to every dataset; there is no
    per-dataset tuning.
    """

    n_estimators: int = 2000
    max_depth: int = 7
    min_samples_split: int = 5
    learning_rate: float = 0.002
    subsample: float = 0.8
    max_features: str = "sqrt"
    folds: int = 5
    seeds: tuple[int, ...] = (0, 1, 2)
    workers: int = 1

    def fast(self) -> "EvalConfig":
        """Desk-scale profile: identical protocol, fewer estimators."""
        return replace(self, n_estimators=FAST_N_ESTIMATORS)


@dataclass(frozen=True)
class MetricReport:
    """Per-fold metric values plus their arithmetic means.

    ``per_fold`` maps each metric name to one value per (seed, fold) pair
    in seed-major order; the six scalar fields are the means over those
    values.
    """

    dataset: str
    per_fold: dict[str, tuple[float, ...]] = field(repr=False)
    macro_f1: float = 0.0
    macro_recall: float = 0.0
    macro_auc: float = 0.0
    accuracy: float = 0.0
    weighted_f1: float = 0.0
    mcc: float = 0.0

    @classmethod
    def from_folds(cls, dataset: str, per_fold: dict) -> "MetricReport":
        per_fold = {name: tuple(per_fold[name]) for name in METRIC_NAMES}
        means = {name: float(np.mean(values)) for name, values in per_fold.items()}
        return cls(dataset=dataset, per_fold=per_fold, **means)

    def means(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def load_feature_csv(path) -> tuple[list[str], np.ndarray]:
    """Read a ``cell_id,<features...>`` CSV into (ids, float matrix)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"feature file not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or len(header) < 2:
            raise ValueError(f"{path}: expected a cell_id column plus features")
        ids, rows = [], []
        for line_no, record in enumerate(reader, start=2):
            if not record:
                continue
            if len(record) != len(header):
                raise ValueError(
                    f"{path}:{line_no}: expected {len(header)} fields, "
                    f"got {len(record)}"
                )
            ids.append(record[0].strip())
            try:
                rows.append([float(tok) for tok in record[1:]])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric feature entry") from None
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return ids, np.asarray(rows, dtype=float)


def load_label_csv(path, ids) -> list[str]:
    """Read a two-column ``cell_id,label`` CSV aligned to ``ids``."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"label file not found: {path}")
    mapping: dict[str, str] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        for line_no, record in enumerate(reader, start=1):
            if not record:
                continue
            if len(record) != 2:
                raise ValueError(
                    f"{path}:{line_no}: expected 2 fields, got {len(record)}"
                )
            cid, label = record[0].strip(), record[1].strip()
            if line_no == 1 and cid == "cell_id":
                continue
            if cid in mapping:
                raise ValueError(f"{path}: duplicate cell id {cid!r}")
            mapping[cid] = label
    missing = [cid for cid in ids if cid not in mapping]
    if missing:
        raise ValueError(f"{path}: missing label for cell id {missing[0]!r}")
    return [mapping[cid] for cid in ids]


def fold_assignment(labels, seed: int, folds: int) -> np.ndarray:
    """Fold index per sample; depends only on (labels, seed, folds)."""
    labels = np.asarray(labels)
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed)
    assignment = np.empty(len(labels), dtype=np.int64)
    for fold, (_, test_idx) in enumerate(
        splitter.split(np.zeros((len(labels), 1)), labels)
    ):
        assignment[test_idx] = fold
    return assignment


def _check_classes(labels, folds: int) -> list[str]:
    classes, counts = np.unique(labels, return_counts=True)
    if len(classes) < 2:
        raise ValueError("need at least 2 classes to evaluate")
    smallest = int(counts.min())
    if smallest < folds:
        offender = classes[int(counts.argmin())]
        raise ValueError(
            f"class {offender!r} has only {smallest} members; "
            f"reduce folds to at most {smallest}"
        )
    return [str(c) for c in classes]


def _run_seed(X, labels, classes, cfg: EvalConfig, seed: int) -> list[dict]:
    labels = np.asarray(labels)
    assignment = fold_assignment(labels, seed, cfg.folds)
    results = []
    for fold in range(cfg.folds):
        test = assignment == fold
        model = GradientBoostingClassifier(
            n_estimators=cfg.n_estimators,
            max_depth=cfg.max_depth,
            min_samples_split=cfg.min_samples_split,
            learning_rate=cfg.learning_rate,
            subsample=cfg.subsample,
            max_features=cfg.max_features,
            random_state=seed,
        )
        model.fit(X[~test], labels[~test])
        pred = model.predict(X[test])
        proba = model.predict_proba(X[test])
        # reorder probability columns to the global class order
        order = [list(model.classes_).index(c) for c in classes]
        results.append(fold_metrics(labels[test], pred, proba[:, order], classes))
    return results


def evaluate(features_csv, labels_csv, cfg: EvalConfig, dataset: str = "") -> MetricReport:
    """Run the full protocol on one dataset's feature and label files.

    Every seed runs a stratified ``cfg.folds``-fold split with a freshly
    trained GBDT per fold; the report collects per-(seed, fold) metrics and
    their means across all folds of all seeds.
    """
    ids, X = load_feature_csv(features_csv)
    labels = load_label_csv(labels_csv, ids)
    classes = _check_classes(labels, cfg.folds)
    if not cfg.seeds:
        raise ValueError("at least one seed is required")

    keyed: dict[int, list[dict]] = {}
    with ThreadPoolExecutor(max_workers=max(1, cfg.workers)) as pool:
        futures = {
            seed: pool.submit(_run_seed, X, labels, classes, cfg, seed)
            for seed in cfg.seeds
        }
        for seed, future in futures.items():
            keyed[seed] = future.result()

    per_fold = {name: [] for name in METRIC_NAMES}
    for seed in cfg.seeds:
        for fold_result in keyed[seed]:
            for name in METRIC_NAMES:
                per_fold[name].append(fold_result[name])
    name = dataset or Path(features_csv).stem
    return MetricReport.from_folds(name, per_fold)
