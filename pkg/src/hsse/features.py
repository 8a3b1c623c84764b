"""Pipeline orchestration: scales x cells x neighborhood sizes x segments.

Each work unit is one (cell, scale, k) patch.  A unit extracts the local
distance submatrix, builds the Rips filtration and the cell-centered
sheaf, and emits the five spectral statistics for every filtration
segment and degree.  Units write to disjoint pre-addressed slices of the
output matrix, so the result is bitwise independent of the worker count
and of scheduling order.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .complexes import DegeneratePatchError, build_rips, uniform_segments
from .embed import (
    ExpressionMatrix,
    Neighborhood,
    builtin_scale_embedding,
    knn_neighborhood,
    pairwise_distances,
    target_dim_rule,
)
from .psl import eigenvalues_sym, persistent_laplacian, spectral_stats
from .sheaf import SheafParams, build_sheaf, center_labels, median_eta

log = logging.getLogger(__name__)

STAT_NAMES = ("sum", "mean", "max", "min", "std")

DEFAULT_SCALES = (5, 14, 25, 37, 50)
DEFAULT_K_SIZES = (5, 10, 15, 20, 30, 40, 50, 60, 70, 80)


@dataclass(frozen=True)
class PipelineConfig:
    scales: tuple = DEFAULT_SCALES
    k_sizes: tuple = DEFAULT_K_SIZES
    segments: int = 5
    alpha: float = 1.0
    metric: str = "chordal"
    degrees: tuple = (0, 1)
    nonzero_only: bool = False
    embedding_provider: str = "builtin"
    workers: int = 1
    eta_override: float | None = None

    def __post_init__(self):
        scales = tuple(int(s) for s in self.scales)
        k_sizes = tuple(int(k) for k in self.k_sizes)
        degrees = tuple(int(q) for q in self.degrees)
        object.__setattr__(self, "scales", scales)
        object.__setattr__(self, "k_sizes", k_sizes)
        object.__setattr__(self, "degrees", degrees)
        if not scales or any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be a strictly increasing, nonempty sequence")
        if not k_sizes or any(b <= a for a, b in zip(k_sizes, k_sizes[1:])):
            raise ValueError("k_sizes must be a strictly increasing, nonempty sequence")
        if self.segments < 1:
            raise ValueError(f"segments must be >= 1, got {self.segments}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.metric not in ("euclidean", "chordal"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if not degrees or not set(degrees) <= {0, 1}:
            raise ValueError(f"degrees must be a nonempty subset of (0, 1)")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.embedding_provider != "builtin" and not self.embedding_provider.startswith(
            "external:"
        ):
            raise ValueError(
                "embedding_provider must be 'builtin' or 'external:<dir>'"
            )

    @property
    def n_features(self) -> int:
        return (
            len(self.scales)
            * len(self.k_sizes)
            * self.segments
            * len(self.degrees)
            * len(STAT_NAMES)
        )

    def validate_against(self, m: int) -> None:
        if max(self.k_sizes) >= m:
            raise ValueError(
                f"largest neighborhood size {max(self.k_sizes)} must be < {m} cells"
            )
        if self.embedding_provider == "builtin" and max(self.scales) >= m:
            raise ValueError(f"scale exceeds dataset: {max(self.scales)} >= {m}")


@dataclass(frozen=True)
class FeatureMatrix:
    cell_ids: list
    columns: list
    values: np.ndarray


def feature_header(cfg: PipelineConfig) -> list[str]:
    """Column names in canonical nested order s -> k -> segment -> q -> stat."""
    return [
        f"s{s}_k{k}_seg{l + 1}_q{q}_{stat}"
        for s in cfg.scales
        for k in cfg.k_sizes
        for l in range(cfg.segments)
        for q in cfg.degrees
        for stat in STAT_NAMES
    ]


def load_external_embedding(directory, scale: int) -> np.ndarray:
    """Read one headerless per-scale embedding CSV (embedding_s{scale}.csv)."""
    path = Path(directory) / f"embedding_s{scale}.csv"
    if not path.exists():
        raise FileNotFoundError(f"missing embedding file {path}")
    Y = np.loadtxt(path, delimiter=",", ndmin=2)
    return Y


def _scale_embedding(X: ExpressionMatrix, cfg: PipelineConfig, s: int) -> np.ndarray:
    if cfg.embedding_provider == "builtin":
        # cap at m - 1: a connected m-point graph has only m - 1
        # nontrivial Laplacian eigenpairs
        d_s = min(target_dim_rule(X.n_cells), X.n_cells - 1)
        return builtin_scale_embedding(X.values, s, d_s).matrix
    directory = cfg.embedding_provider.split(":", 1)[1]
    Y = load_external_embedding(directory, s)
    if Y.shape[0] != X.n_cells:
        raise ValueError(
            f"embedding for scale {s} has {Y.shape[0]} rows, expected {X.n_cells}"
        )
    return Y


def _patch_block(D_s: np.ndarray, i: int, k: int, cfg: PipelineConfig) -> np.ndarray:
    """Feature block of one (cell, k) patch: segments x degrees x stats."""
    block = np.zeros(cfg.segments * len(cfg.degrees) * len(STAT_NAMES))
    hood = knn_neighborhood(D_s, i, k)
    members = hood.members
    D_local = D_s[np.ix_(members, members)]
    K = build_rips(D_local, r_max="auto", d_max=2)
    eta = cfg.eta_override if cfg.eta_override is not None else median_eta(D_local)
    labels = center_labels(len(members), int(np.searchsorted(members, i)))
    sheaf = build_sheaf(K, D_local, labels, SheafParams(eta=eta, alpha=cfg.alpha))
    pos = 0
    for interval in uniform_segments(K.r_max, cfg.segments):
        for q in cfg.degrees:
            op = persistent_laplacian(sheaf, interval, q)
            w = eigenvalues_sym(op.matrix)
            if cfg.nonzero_only:
                w = w[w > 0]
            block[pos : pos + 5] = spectral_stats(w)
            pos += 5
    return block


def run_pipeline(X, cfg: PipelineConfig) -> tuple[FeatureMatrix, dict]:
    """Compute the per-cell feature matrix; also returns stage timings."""
    if not isinstance(X, ExpressionMatrix):
        X = np.asarray(X, dtype=float)
        X = ExpressionMatrix(X, [str(i) for i in range(X.shape[0])])
    cfg.validate_against(X.n_cells)

    timings: dict = {}
    t0 = time.perf_counter()
    distance_by_scale = {}
    for s in cfg.scales:
        Y = _scale_embedding(X, cfg, s)
        distance_by_scale[s] = pairwise_distances(Y, cfg.metric)
    timings["embeddings_seconds"] = time.perf_counter() - t0

    m = X.n_cells
    block_width = cfg.segments * len(cfg.degrees) * len(STAT_NAMES)
    values = np.zeros((m, cfg.n_features))

    units = [
        (si, s, i, ki, k)
        for si, s in enumerate(cfg.scales)
        for i in range(m)
        for ki, k in enumerate(cfg.k_sizes)
    ]

    def run_unit(unit):
        si, s, i, ki, k = unit
        col0 = (si * len(cfg.k_sizes) + ki) * block_width
        try:
            block = _patch_block(distance_by_scale[s], i, k, cfg)
        except DegeneratePatchError:
            log.warning("degenerate patch for cell %d (s=%d, k=%d); zero-filled", i, s, k)
            block = np.zeros(block_width)
        except Exception as exc:
            raise RuntimeError(f"patch failed for cell {i} (s={s}, k={k}): {exc}") from exc
        values[i, col0 : col0 + block_width] = block

    t0 = time.perf_counter()
    if cfg.workers == 1:
        for unit in units:
            run_unit(unit)
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for _ in pool.map(run_unit, units):
                pass
    timings["spectra_seconds"] = time.perf_counter() - t0

    return FeatureMatrix(list(X.cell_ids), feature_header(cfg), values), timings


def hsse_features(X, cfg: PipelineConfig) -> FeatureMatrix:
    """Aggregated per-cell spectral feature matrix (see module docstring)."""
    return run_pipeline(X, cfg)[0]
