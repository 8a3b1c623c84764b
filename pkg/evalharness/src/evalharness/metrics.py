"""Per-fold classification metrics.

Six metrics are reported for every fold: macro-F1, macro-recall, macro-AUC
(one-vs-rest), accuracy, weighted F1 and Matthews correlation.  All are
thin wrappers over scikit-learn with the class set pinned explicitly, so a
fold that never predicts some class still scores against the full label
alphabet.
"""

from __future__ import annotations

import numpy as np
from sklearn.metrics import (
    accuracy_score,
    f1_score,
    matthews_corrcoef,
    recall_score,
    roc_auc_score,
)

#: canonical metric order used in reports and tables
METRIC_NAMES = (
    "macro_f1",
    "macro_recall",
    "macro_auc",
    "accuracy",
    "weighted_f1",
    "mcc",
)


def macro_auc(y_true, proba: np.ndarray, classes) -> float:
    """One-vs-rest macro-averaged AUC.

    ``proba`` columns follow ``classes``.  The binary case reduces to the
    plain AUC of the positive-class score.
    """
    classes = list(classes)
    if proba.shape[1] != len(classes):
        raise ValueError(
            f"probability matrix has {proba.shape[1]} columns "
            f"for {len(classes)} classes"
        )
    if len(classes) == 2:
        positive = np.asarray([y == classes[1] for y in y_true])
        return float(roc_auc_score(positive, proba[:, 1]))
    return float(
        roc_auc_score(
            y_true, proba, multi_class="ovr", average="macro", labels=classes
        )
    )


def fold_metrics(y_true, y_pred, proba: np.ndarray, classes) -> dict[str, float]:
    """All six metrics for one evaluation fold."""
    classes = list(classes)
    return {
        "macro_f1": float(
            f1_score(y_true, y_pred, labels=classes, average="macro", zero_division=0)
        ),
        "macro_recall": float(
            recall_score(
                y_true, y_pred, labels=classes, average="macro", zero_division=0
            )
        ),
        "macro_auc": macro_auc(y_true, proba, classes),
        "accuracy": float(accuracy_score(y_true, y_pred)),
        "weighted_f1": float(
            f1_score(
                y_true, y_pred, labels=classes, average="weighted", zero_division=0
            )
        ),
        "mcc": float(matthews_corrcoef(y_true, y_pred)),
    }
