"""Scale-dependent embeddings, distance matrices and k-NN neighborhoods.

The scale parameter s selects the neighbor count of a symmetrized s-NN
graph; the built-in provider returns a Laplacian-eigenmaps embedding of
that graph, which is deterministic for a fixed input, in place of
stochastic manifold learners.  Externally computed per-scale embeddings
can be supplied as CSV files instead (see ``features``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components


@dataclass(frozen=True)
class ExpressionMatrix:
    """Cells-by-genes matrix with stable cell identifiers."""

    values: np.ndarray
    cell_ids: list

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"expression matrix must be 2-D, got {v.ndim}-D")
        if v.shape[0] < 2:
            raise ValueError("expression matrix needs at least two cells")
        if not np.all(np.isfinite(v)):
            raise ValueError("expression matrix contains non-finite entries")
        if len(self.cell_ids) != v.shape[0]:
            raise ValueError("cell_ids length must match the number of rows")
        object.__setattr__(self, "values", v)

    @property
    def n_cells(self) -> int:
        return self.values.shape[0]

    @property
    def n_genes(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class ScaleEmbedding:
    scale: int
    matrix: np.ndarray


@dataclass(frozen=True)
class Neighborhood:
    center: int
    k: int
    members: np.ndarray  # sorted, size k + 1, contains center


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    out = components.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def pca(X, d: int) -> np.ndarray:
    """Project onto the top-d principal components.

    Columns are ordered by descending explained variance; each component's
    sign is fixed so that its largest-magnitude loading is positive.
    """
    if isinstance(X, ExpressionMatrix):
        X = X.values
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    if not 2 <= d <= min(m, n):
        raise ValueError(f"d must be in [2, {min(m, n)}], got {d}")
    Xc = X - X.mean(axis=0)
    U, s, Vt = np.linalg.svd(Xc, full_matrices=False)
    V = _fix_signs(Vt[:d].T)
    return Xc @ V


def builtin_scale_embedding(X, s: int, d_s: int) -> ScaleEmbedding:
    """Deterministic spectral embedding at neighbor-count scale s.

    PCA to min(50, n) dimensions, symmetrized s-nearest-neighbor graph
    with Gaussian weights (per-point bandwidth = distance to the s-th
    neighbor), then Laplacian eigenmaps: the d_s eigenvectors of the
    symmetric normalized Laplacian with smallest nonzero eigenvalues,
    each scaled by 1/sqrt(lambda).
    """
    if isinstance(X, ExpressionMatrix):
        X = X.values
    X = np.asarray(X, dtype=float)
    m, n = X.shape
    if s < 2:
        raise ValueError(f"scale must be at least 2, got {s}")
    if s >= m:
        raise ValueError(f"scale exceeds dataset: s={s} with {m} cells")
    if d_s < 2:
        raise ValueError(f"embedding dimension must be >= 2, got {d_s}")

    d_pca = min(50, n, m)
    Y = pca(X, d_pca) if d_pca >= 2 else X - X.mean(axis=0)
    sq = np.maximum(
        (Y**2).sum(axis=1)[:, None] + (Y**2).sum(axis=1)[None, :] - 2 * Y @ Y.T, 0
    )
    D = np.sqrt(sq)
    np.fill_diagonal(D, 0.0)

    order = np.argsort(D, axis=1, kind="stable")
    bw = D[np.arange(m), order[:, s]]
    bw = np.where(bw > 0, bw, np.where(D.max() > 0, D.max(), 1.0))
    A = np.zeros((m, m))
    rows = np.repeat(np.arange(m), s)
    cols = order[:, 1 : s + 1].ravel()
    A[rows, cols] = np.exp(-(D[rows, cols] ** 2) / (bw[rows] * bw[cols]))
    A = np.maximum(A, A.T)

    n_comp, comp_labels = connected_components(A > 0, directed=False)
    if m - n_comp < d_s:
        sizes = np.bincount(comp_labels)
        raise ValueError(
            f"graph disconnected: {n_comp} components (sizes {sizes.tolist()}) "
            f"leave only {m - n_comp} nontrivial eigenpairs, need {d_s}"
        )

    deg = A.sum(axis=1)
    L = np.eye(m) - A / np.sqrt(np.outer(deg, deg))
    w, V = scipy.linalg.eigh(L)
    # the kernel has exactly one eigenvector per connected component
    V = _fix_signs(V[:, n_comp : n_comp + d_s])
    lam = w[n_comp : n_comp + d_s]
    return ScaleEmbedding(scale=s, matrix=V / np.sqrt(lam))


def pairwise_distances(Y, metric: str = "chordal") -> np.ndarray:
    """Symmetric pairwise distance matrix of embedding rows.

    ``euclidean`` uses plain row distances; ``chordal`` normalizes each
    row to the unit sphere first (scale-invariant).
    """
    Y = np.asarray(Y.matrix if isinstance(Y, ScaleEmbedding) else Y, dtype=float)
    if metric == "chordal":
        norms = np.linalg.norm(Y, axis=1)
        zero = np.nonzero(norms == 0)[0]
        if zero.size:
            raise ValueError(f"chordal metric undefined for zero row {zero[0]}")
        Y = Y / norms[:, None]
    elif metric != "euclidean":
        raise ValueError(f"unknown metric {metric!r}")
    sq = np.maximum(
        (Y**2).sum(axis=1)[:, None] + (Y**2).sum(axis=1)[None, :] - 2 * Y @ Y.T, 0
    )
    D = np.sqrt(sq)
    np.fill_diagonal(D, 0.0)
    return np.maximum(D, D.T)


def knn_neighborhood(D: np.ndarray, i: int, k: int) -> Neighborhood:
    """Center cell plus its k nearest neighbors, ties broken by index."""
    m = D.shape[0]
    if not 1 <= k <= m - 1:
        raise ValueError(f"k must be in [1, {m - 1}], got {k}")
    order = np.argsort(D[i], kind="stable")
    neighbors = order[order != i][:k]
    members = np.sort(np.concatenate([[i], neighbors]))
    return Neighborhood(center=i, k=k, members=members.astype(np.int64))


def target_dim_rule(m: int) -> int:
    """Embedding dimension as a function of dataset size."""
    if m < 2:
        raise ValueError(f"need at least two cells, got {m}")
    if m < 400:
        return 15
    if m <= 1200:
        return 20
    return 50
