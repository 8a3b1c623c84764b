"""Cross-validated GBDT evaluation harness for cell-feature CSVs."""

from .harness import (
    EvalConfig,
    MetricReport,
    evaluate,
    fold_assignment,
    load_feature_csv,
    load_label_csv,
)
from .metrics import METRIC_NAMES, fold_metrics, macro_auc
from .tables import ComparisonTable, compare_table

__version__ = "0.1.0"

__all__ = [
    "EvalConfig",
    "MetricReport",
    "evaluate",
    "fold_assignment",
    "load_feature_csv",
    "load_label_csv",
    "METRIC_NAMES",
    "fold_metrics",
    "macro_auc",
    "ComparisonTable",
    "compare_table",
    "__version__",
]
