"""Scikit-learn style transformer wrapping the feature pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .features import DEFAULT_K_SIZES, DEFAULT_SCALES, PipelineConfig, run_pipeline


class HSSEFeaturizer(TransformerMixin, BaseEstimator):
    """Transform a cells-by-genes matrix into hierarchical sheaf spectral
    features.

    Stateless apart from input validation: ``fit`` only records the input
    width, and ``transform`` runs the full pipeline on the given matrix.

    Parameters mirror :class:`hsse.features.PipelineConfig`.
    """

    def __init__(
        self,
        scales=DEFAULT_SCALES,
        k_sizes=DEFAULT_K_SIZES,
        segments=5,
        alpha=1.0,
        metric="chordal",
        degrees=(0, 1),
        nonzero_only=False,
        embedding_provider="builtin",
        workers=1,
        eta_override=None,
    ):
        self.scales = scales
        self.k_sizes = k_sizes
        self.segments = segments
        self.alpha = alpha
        self.metric = metric
        self.degrees = degrees
        self.nonzero_only = nonzero_only
        self.embedding_provider = embedding_provider
        self.workers = workers
        self.eta_override = eta_override

    def _config(self) -> PipelineConfig:
        return PipelineConfig(
            scales=tuple(self.scales),
            k_sizes=tuple(self.k_sizes),
            segments=self.segments,
            alpha=self.alpha,
            metric=self.metric,
            degrees=tuple(self.degrees),
            nonzero_only=self.nonzero_only,
            embedding_provider=self.embedding_provider,
            workers=self.workers,
            eta_override=self.eta_override,
        )

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        cfg = self._config()
        cfg.validate_against(X.shape[0])
        self.n_features_in_ = X.shape[1]
        self.feature_names_out_ = None
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X, dtype=float)
        fm, _ = run_pipeline(X, self._config())
        self.feature_names_out_ = list(fm.columns)
        return fm.values

    def get_feature_names_out(self, input_features=None):
        from .features import feature_header

        return np.asarray(feature_header(self._config()), dtype=object)
