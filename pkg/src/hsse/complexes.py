"""Distance-induced Vietoris-Rips filtrations truncated at dimension 2.

A filtered complex is stored as flat arrays of edges and triangles with
their filtration values, sorted lexicographically by vertex tuple.  The
lexicographic order is the canonical basis everywhere downstream: slicing
a complex at a threshold keeps the relative order, so cochain matrices
built at different thresholds share consistent index semantics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


class DegeneratePatchError(ValueError):
    """Raised when a local distance matrix carries no positive distance."""


class Simplex(NamedTuple):
    vertices: tuple
    filtration_value: float

    @property
    def dimension(self) -> int:
        return len(self.vertices) - 1


class FiltrationInterval(NamedTuple):
    a: float
    b: float


def validate_distance_matrix(D) -> np.ndarray:
    """Validate and return a local distance matrix as a float array.

    Requires a square, symmetric, finite, nonnegative matrix with zero
    diagonal.  Raises ValueError otherwise.
    """
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"distance matrix must be square, got shape {D.shape}")
    if D.shape[0] < 1:
        raise ValueError("distance matrix must have at least one vertex")
    if not np.all(np.isfinite(D)):
        raise ValueError("distance matrix contains non-finite entries")
    if np.any(D < 0):
        raise ValueError("distance matrix contains negative entries")
    if np.any(np.diag(D) != 0):
        raise ValueError("distance matrix diagonal must be zero")
    if not np.array_equal(D, D.T):
        raise ValueError("distance matrix is not symmetric")
    return D


@dataclass(frozen=True)
class FilteredComplex:
    """Rips filtration with simplices of dimension <= 2.

    ``edges`` is an (E, 2) array of vertex pairs u < v in lexicographic
    order; ``triangles`` an (T, 3) array of sorted triples, also
    lexicographic.  ``triangle_edges`` gives, per triangle (u, v, w), the
    edge indices of its faces in the order ((u, v), (u, w), (v, w)).
    """

    n_vertices: int
    edges: np.ndarray
    edge_values: np.ndarray
    triangles: np.ndarray
    triangle_values: np.ndarray
    triangle_edges: np.ndarray
    r_max: float

    def edge_mask_at(self, t: float) -> np.ndarray:
        return self.edge_values <= t

    def triangle_mask_at(self, t: float) -> np.ndarray:
        return self.triangle_values <= t

    def simplex_count(self, q: int) -> int:
        if q == 0:
            return self.n_vertices
        if q == 1:
            return len(self.edges)
        if q == 2:
            return len(self.triangles)
        raise ValueError(f"dimension q must be in {{0,1,2}}, got {q}")


def build_rips(D, r_max="auto", d_max: int = 2) -> FilteredComplex:
    """Build the Vietoris-Rips filtration of a local distance matrix.

    An edge (u, v) enters at D[u, v]; a triangle enters at the maximum of
    its three edge distances (closed sublevel: ties at exactly the
    threshold are included).  With ``r_max="auto"`` the truncation radius
    is the largest positive distance; an all-zero matrix is rejected as a
    degenerate patch.
    """
    D = validate_distance_matrix(D)
    n = D.shape[0]
    if d_max not in (1, 2):
        raise ValueError(f"d_max must be 1 or 2, got {d_max}")
    if r_max == "auto":
        positive = D[D > 0]
        if positive.size == 0:
            raise DegeneratePatchError("degenerate patch: all distances are zero")
        r_max = float(positive.max())
    else:
        r_max = float(r_max)
        if r_max <= 0:
            raise ValueError(f"r_max must be positive, got {r_max}")

    iu, ju = np.triu_indices(n, k=1)
    dvals = D[iu, ju]
    keep = dvals <= r_max
    edges = np.column_stack([iu[keep], ju[keep]]).astype(np.int64)
    edge_values = dvals[keep]

    if d_max == 2 and len(edges) > 0:
        adj = D <= r_max
        np.fill_diagonal(adj, False)
        eid = np.full((n, n), -1, dtype=np.int64)
        eid[edges[:, 0], edges[:, 1]] = np.arange(len(edges))
        tri_rows = []
        # iterate edges in lexicographic order; third vertex w > v keeps
        # each triangle enumerated exactly once, already sorted
        for e, (u, v) in enumerate(edges):
            ws = np.nonzero(adj[u] & adj[v])[0]
            ws = ws[ws > v]
            if ws.size:
                tri_rows.append(
                    np.column_stack([np.full(ws.size, u), np.full(ws.size, v), ws])
                )
        if tri_rows:
            triangles = np.vstack(tri_rows).astype(np.int64)
            # lexicographic by (u, v, w): stable sort on w within the
            # lexicographic edge sweep already yields this order
            order = np.lexsort((triangles[:, 2], triangles[:, 1], triangles[:, 0]))
            triangles = triangles[order]
            tu, tv, tw = triangles[:, 0], triangles[:, 1], triangles[:, 2]
            triangle_values = np.maximum(np.maximum(D[tu, tv], D[tu, tw]), D[tv, tw])
            triangle_edges = np.column_stack([eid[tu, tv], eid[tu, tw], eid[tv, tw]])
        else:
            triangles = np.empty((0, 3), dtype=np.int64)
            triangle_values = np.empty(0)
            triangle_edges = np.empty((0, 3), dtype=np.int64)
    else:
        triangles = np.empty((0, 3), dtype=np.int64)
        triangle_values = np.empty(0)
        triangle_edges = np.empty((0, 3), dtype=np.int64)

    return FilteredComplex(
        n_vertices=n,
        edges=edges,
        edge_values=edge_values,
        triangles=triangles,
        triangle_values=triangle_values,
        triangle_edges=triangle_edges,
        r_max=r_max,
    )


def simplices_at(K: FilteredComplex, t: float, q: int) -> list[Simplex]:
    """All q-simplices present at threshold t, in lexicographic order."""
    if q not in (0, 1, 2):
        raise ValueError(f"dimension q must be in {{0,1,2}}, got {q}")
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    if q == 0:
        return [Simplex((v,), 0.0) for v in range(K.n_vertices)]
    if q == 1:
        mask = K.edge_mask_at(t)
        return [
            Simplex((int(u), int(v)), float(f))
            for (u, v), f in zip(K.edges[mask], K.edge_values[mask])
        ]
    mask = K.triangle_mask_at(t)
    return [
        Simplex((int(u), int(v), int(w)), float(f))
        for (u, v, w), f in zip(K.triangles[mask], K.triangle_values[mask])
    ]


def orientation_sign(face, cofacet) -> int:
    """Sign of a codimension-one face relation under sorted-vertex orientation.

    Returns (-1)**j where j is the position in ``cofacet`` of the vertex
    missing from ``face``.
    """
    fv = tuple(face.vertices) if isinstance(face, Simplex) else tuple(face)
    cv = tuple(cofacet.vertices) if isinstance(cofacet, Simplex) else tuple(cofacet)
    if len(cv) != len(fv) + 1 or not set(fv) <= set(cv):
        raise ValueError(f"{fv} is not a codimension-one face of {cv}")
    missing = set(cv) - set(fv)
    j = cv.index(missing.pop())
    return 1 if j % 2 == 0 else -1


def uniform_segments(b_max: float, L: int) -> list[FiltrationInterval]:
    """Split [0, b_max] into L contiguous intervals of equal width.

    Endpoints are computed in closed form (b_max * l / L), so the final
    endpoint equals b_max exactly.
    """
    if L <= 0:
        raise ValueError(f"segment count must be positive, got {L}")
    if b_max <= 0:
        raise ValueError(f"b_max must be positive, got {b_max}")
    breakpoints = [b_max * l / L for l in range(L)] + [b_max]
    return [FiltrationInterval(a, b) for a, b in zip(breakpoints, breakpoints[1:])]
