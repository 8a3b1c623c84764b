"""Hierarchical sheaf spectral embedding features for expression data."""

__version__ = "0.1.0"

from .complexes import (
    DegeneratePatchError,
    FilteredComplex,
    FiltrationInterval,
    Simplex,
    build_rips,
    orientation_sign,
    simplices_at,
    uniform_segments,
)
from .embed import (
    ExpressionMatrix,
    Neighborhood,
    ScaleEmbedding,
    builtin_scale_embedding,
    knn_neighborhood,
    pairwise_distances,
    pca,
    target_dim_rule,
)
from .estimator import HSSEFeaturizer
from .features import (
    FeatureMatrix,
    PipelineConfig,
    feature_header,
    hsse_features,
    load_external_embedding,
    run_pipeline,
)
from .io import (
    load_expression,
    load_labels,
    read_features,
    write_features,
    write_sidecar,
)
from .psl import (
    PslOperator,
    PslSpectrum,
    SpectralStats,
    eigenvalues_sym,
    laplacian_at,
    persistent_laplacian,
    persistent_up_schur,
    spectral_stats,
)
from .sheaf import (
    SheafAssignment,
    SheafParams,
    assemble_coboundary,
    build_sheaf,
    center_labels,
    kernel_weight,
    label_discrepancy,
    median_eta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
