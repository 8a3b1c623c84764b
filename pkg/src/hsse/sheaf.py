"""Cell-centered cellular sheaves with scalar restriction weights.

Stalks are one-dimensional, so every restriction map is a positive scalar.
A vertex-to-edge weight combines a Gaussian distance kernel with a label
modulation factor; an edge-to-triangle weight averages the two kernel
terms toward the opposite vertex.  Weights depend only on the distance
matrix, the labels and (eta, alpha), so they are computed once per patch
and reused at every filtration threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .complexes import DegeneratePatchError, FilteredComplex, validate_distance_matrix


@dataclass(frozen=True)
class SheafParams:
    """Kernel scale eta (may be math.inf for the constant kernel) and
    label modulation strength alpha."""

    eta: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (self.eta > 0):
            raise ValueError(f"eta must be positive, got {self.eta}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")


@dataclass(frozen=True)
class SheafAssignment:
    """Restriction weights on a filtered complex.

    ``vertex_edge_weights[e, 0]`` is the weight from the lower endpoint of
    edge e into e, ``[e, 1]`` from the higher endpoint.
    ``edge_triangle_weights[t, j]`` is the weight of the j-th face edge of
    triangle t (faces ordered ((u,v), (u,w), (v,w)) as in
    ``FilteredComplex.triangle_edges``).
    """

    complex: FilteredComplex
    vertex_edge_weights: np.ndarray
    edge_triangle_weights: np.ndarray

    def scaled(self, c: float) -> "SheafAssignment":
        """Every restriction weight multiplied by c (test hook for the
        quadratic eigenvalue scaling law)."""
        return SheafAssignment(
            complex=self.complex,
            vertex_edge_weights=self.vertex_edge_weights * c,
            edge_triangle_weights=self.edge_triangle_weights * c,
        )


@dataclass(frozen=True)
class CoboundaryMatrix:
    """Signed, weight-scaled cochain map at a fixed threshold.

    ``row_index`` / ``col_index`` are positions into the complex's global
    lexicographic simplex arrays for the row and column degrees.
    """

    matrix: csr_matrix
    degree: int
    threshold: float
    row_index: np.ndarray
    col_index: np.ndarray

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def median_eta(D) -> float:
    """Median of the positive pairwise distances of a patch."""
    D = validate_distance_matrix(D)
    iu, ju = np.triu_indices(D.shape[0], k=1)
    vals = D[iu, ju]
    vals = vals[vals > 0]
    if vals.size == 0:
        raise DegeneratePatchError("degenerate patch: no positive distances")
    return float(np.median(vals))


def kernel_weight(d: float, eta: float) -> float:
    """Gaussian kernel exp(-d^2 / eta^2); eta = inf gives the constant 1."""
    if d < 0:
        raise ValueError(f"distance must be nonnegative, got {d}")
    if not (eta > 0):
        raise ValueError(f"eta must be positive, got {eta}")
    if math.isinf(eta):
        return 1.0
    return math.exp(-((d / eta) ** 2))


def label_discrepancy(lu: int, lv: int) -> int:
    if lu not in (0, 1) or lv not in (0, 1):
        raise ValueError(f"labels must be 0 or 1, got ({lu}, {lv})")
    return abs(lu - lv)


def center_labels(n_vertices: int, center: int) -> np.ndarray:
    """Binary labeling with 0 at the center vertex and 1 elsewhere."""
    if not 0 <= center < n_vertices:
        raise ValueError(f"center {center} out of range for {n_vertices} vertices")
    labels = np.ones(n_vertices, dtype=np.int64)
    labels[center] = 0
    return labels


def _pair_weights(D: np.ndarray, labels: np.ndarray, params: SheafParams) -> np.ndarray:
    """Matrix W[u, v] = kernel(D[u, v]) * exp(-alpha * |l(u) - l(v)|)."""
    if math.isinf(params.eta):
        kernel = np.ones_like(D)
    else:
        kernel = np.exp(-((D / params.eta) ** 2))
    disc = np.abs(labels[:, None] - labels[None, :]).astype(float)
    return kernel * np.exp(-params.alpha * disc)


def build_sheaf(
    K: FilteredComplex, D, labels, params: SheafParams
) -> SheafAssignment:
    """Attach restriction weights to every codimension-one face relation.

    Both endpoints of an edge (u, v) receive the same weight
    kernel(D[u,v]) * exp(-alpha * m(u,v)).  The face edge of a triangle
    opposite vertex w receives the mean of the two kernel terms toward w.
    """
    D = validate_distance_matrix(D)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (K.n_vertices,):
        raise ValueError(
            f"labels must cover all {K.n_vertices} vertices, got shape {labels.shape}"
        )
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be binary (0 = center cell, 1 = neighbor)")
    W = _pair_weights(D, labels, params)

    eu, ev = K.edges[:, 0], K.edges[:, 1]
    ew = W[eu, ev]
    vertex_edge = np.column_stack([ew, ew])

    if len(K.triangles) > 0:
        tu, tv, tw = K.triangles[:, 0], K.triangles[:, 1], K.triangles[:, 2]
        # faces ordered ((u,v), (u,w), (v,w)); opposite vertices (w, v, u)
        w_uv = 0.5 * (W[tu, tw] + W[tv, tw])
        w_uw = 0.5 * (W[tu, tv] + W[tw, tv])
        w_vw = 0.5 * (W[tv, tu] + W[tw, tu])
        edge_triangle = np.column_stack([w_uv, w_uw, w_vw])
    else:
        edge_triangle = np.empty((0, 3))

    return SheafAssignment(
        complex=K,
        vertex_edge_weights=vertex_edge,
        edge_triangle_weights=edge_triangle,
    )


# signs of the faces ((u,v), (u,w), (v,w)) of a triangle (u,v,w):
# the missing vertex sits at position 2, 1, 0 respectively
_TRI_SIGNS = np.array([1.0, -1.0, 1.0])


def assemble_coboundary(sheaf: SheafAssignment, t: float, q: int) -> CoboundaryMatrix:
    """Coboundary from q-cochains to (q+1)-cochains at threshold t.

    Bases are the lexicographic q- and (q+1)-simplices present at t.  A
    delta_0 row for edge (u, v) is (-rho_u, +rho_v); a delta_1 row applies
    the orientation sign of each face edge times its restriction weight.
    """
    if q not in (0, 1):
        raise ValueError(f"coboundary degree must be 0 or 1, got {q}")
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    K = sheaf.complex
    if q == 0:
        rows = np.nonzero(K.edge_mask_at(t))[0]
        n_rows, n_cols = len(rows), K.n_vertices
        col_index = np.arange(n_cols)
        if n_rows == 0:
            mat = csr_matrix((0, n_cols))
        else:
            w = sheaf.vertex_edge_weights[rows]
            data = np.column_stack([-w[:, 0], w[:, 1]]).ravel()
            indices = K.edges[rows].ravel()
            indptr = np.arange(0, 2 * n_rows + 1, 2)
            mat = csr_matrix((data, indices, indptr), shape=(n_rows, n_cols))
        return CoboundaryMatrix(mat, 0, t, rows, col_index)

    edge_mask = K.edge_mask_at(t)
    col_index = np.nonzero(edge_mask)[0]
    rows = np.nonzero(K.triangle_mask_at(t))[0]
    n_cols = len(col_index)
    # remap global edge ids to positions within the sliced basis
    edge_pos = np.cumsum(edge_mask) - 1
    if len(rows) == 0:
        mat = csr_matrix((0, n_cols))
    else:
        w = sheaf.edge_triangle_weights[rows]
        data = (w * _TRI_SIGNS).ravel()
        indices = edge_pos[K.triangle_edges[rows]].ravel()
        indptr = np.arange(0, 3 * len(rows) + 1, 3)
        mat = csr_matrix((data, indices, indptr), shape=(len(rows), n_cols))
    return CoboundaryMatrix(mat, 1, t, rows, col_index)
