"""Persistent sheaf Laplacian operators, spectra and summary statistics.

The per-scale operator at threshold t is d_q(t)^T d_q(t) plus, for q = 1,
the down term d_0(t) d_0(t)^T.  The interval operator on [a, b] replaces
the up term by the generalized Schur complement of the up-Laplacian at b
over the q-simplices absent from the complex at a; the down term is taken
at a.  All operators are dense symmetric matrices; sizes are bounded by
the edge count of a patch, so a dense eigensolver is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .complexes import FiltrationInterval
from .sheaf import SheafAssignment, assemble_coboundary

#: relative singular-value cutoff for the pseudo-inverse of the
#: eliminated block in the Schur complement
TAU_PINV = 1e-10

#: relative band around zero inside which eigenvalues are clipped to 0
TAU_ZERO = 1e-10

#: relative asymmetry beyond which a matrix is rejected as non-symmetric
TAU_SYM = 1e-9


@dataclass(frozen=True)
class PslOperator:
    degree: int
    interval: FiltrationInterval
    matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class PslSpectrum:
    eigenvalues: np.ndarray
    degree: int
    interval: FiltrationInterval


class SpectralStats(tuple):
    """(sum, mean, max, min, std) of an eigenvalue multiset."""

    __slots__ = ()

    def __new__(cls, sum, mean, max, min, std):
        return super().__new__(cls, (sum, mean, max, min, std))

    sum = property(lambda self: self[0])
    mean = property(lambda self: self[1])
    max = property(lambda self: self[2])
    min = property(lambda self: self[3])
    std = property(lambda self: self[4])


def laplacian_at(sheaf: SheafAssignment, t: float, q: int) -> np.ndarray:
    """Sheaf Laplacian at a single threshold.

    q = 0: d_0^T d_0 (the down term is omitted by convention);
    q = 1: d_1^T d_1 + d_0 d_0^T on the edges present at t.
    """
    if q not in (0, 1):
        raise ValueError(f"degree must be 0 or 1, got {q}")
    d_q = assemble_coboundary(sheaf, t, q).matrix
    up = (d_q.T @ d_q).toarray()
    if q == 0:
        return up
    d_prev = assemble_coboundary(sheaf, t, 0).matrix
    return up + (d_prev @ d_prev.T).toarray()


#: flop guard below which the factored (SVD) elimination path is used
_FACTOR_FLOP_LIMIT = 2e8


def persistent_up_schur(L_up_b: np.ndarray, keep, factor=None) -> np.ndarray:
    """Generalized Schur complement of a PSD up-Laplacian onto ``keep``.

    keep indexes the q-simplices still present at the lower endpoint a;
    the complement block (simplices born in (a, b]) is eliminated through
    a pseudo-inverse with relative cutoff TAU_PINV.  With nothing to
    eliminate the matrix is returned unchanged.

    When the coboundary ``factor`` with L_up_b = factor^T factor is
    available and small enough, the eliminated block is projected out via
    an SVD of the factor columns instead of an eigendecomposition of the
    squared block: L_BB's tiny eigenvalues only carry eps * ||L_BB||
    absolute accuracy, while the factor's singular vectors give the same
    projector without dividing by them.
    """
    L_up_b = np.asarray(L_up_b, dtype=float)
    n = L_up_b.shape[0]
    keep = np.asarray(keep)
    if keep.dtype == bool:
        keep_idx = np.nonzero(keep)[0]
    else:
        keep_idx = keep.astype(np.int64)
    drop = np.setdiff1d(np.arange(n), keep_idx, assume_unique=False)
    if len(keep_idx) == 0:
        return np.zeros((0, 0))
    if len(drop) == 0:
        return L_up_b[np.ix_(keep_idx, keep_idx)].copy()

    AA = L_up_b[np.ix_(keep_idx, keep_idx)]
    if factor is not None and factor.shape[0] * len(drop) ** 2 <= _FACTOR_FLOP_LIMIT:
        F_B = np.asarray(factor[:, drop].todense())
        F_A = np.asarray(factor[:, keep_idx].todense())
        if F_B.shape[0] == 0:
            return AA.copy()
        U, sv, _ = np.linalg.svd(F_B, full_matrices=False)
        # sigma^2 > TAU_PINV * sigma_max^2 matches the eigenvalue cutoff
        kept = sv > np.sqrt(TAU_PINV) * (sv[0] if sv.size else 0.0)
        if not np.any(kept):
            return AA.copy()
        Z = U[:, kept].T @ F_A
        S = AA - Z.T @ Z
        return 0.5 * (S + S.T)

    AB = L_up_b[np.ix_(keep_idx, drop)]
    BB = L_up_b[np.ix_(drop, drop)]
    w, V = scipy.linalg.eigh(BB, driver="evd")
    cutoff = TAU_PINV * max(w[-1], 0.0)
    pos = w > cutoff
    if not np.any(pos):
        return AA.copy()
    W = AB @ (V[:, pos] / np.sqrt(w[pos]))
    S = AA - W @ W.T
    return 0.5 * (S + S.T)


def persistent_laplacian(
    sheaf: SheafAssignment, interval: FiltrationInterval, q: int
) -> PslOperator:
    """(a, b)-persistent sheaf Laplacian acting on the q-cochains at a."""
    if q not in (0, 1):
        raise ValueError(f"degree must be 0 or 1, got {q}")
    a, b = interval
    if not 0 <= a <= b:
        raise ValueError(f"invalid interval {interval}")
    K = sheaf.complex

    if q == 0:
        # every vertex is present at t = 0, so nothing is eliminated and
        # the up term is the full 0-Laplacian at b
        d0 = assemble_coboundary(sheaf, b, 0).matrix
        return PslOperator(0, interval, (d0.T @ d0).toarray())

    edge_mask_a = K.edge_mask_at(a)
    n_a = int(edge_mask_a.sum())
    if n_a == 0:
        return PslOperator(1, interval, np.zeros((0, 0)))

    cb1 = assemble_coboundary(sheaf, b, 1)
    d1b = cb1.matrix
    L_up_b = (d1b.T @ d1b).toarray()
    keep = edge_mask_a[cb1.col_index]
    up = persistent_up_schur(L_up_b, keep, factor=d1b)

    d0a = assemble_coboundary(sheaf, a, 0).matrix
    down = (d0a @ d0a.T).toarray()
    return PslOperator(1, interval, up + down)


def eigenvalues_sym(M: np.ndarray) -> np.ndarray:
    """Ascending spectrum of a symmetric matrix with near-zero clipping.

    Values within TAU_ZERO * max(1, spectral norm) of zero are clipped to
    exactly 0 so that harmonic eigenvalue counts are integers.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return np.empty(0)
    scale = max(1.0, float(np.abs(M).max()))
    if float(np.abs(M - M.T).max()) > TAU_SYM * scale:
        raise ValueError("matrix is not symmetric")
    w = np.linalg.eigvalsh(M)
    tau = TAU_ZERO * max(1.0, float(np.abs(w).max()))
    w[np.abs(w) <= tau] = 0.0
    return w


def spectral_stats(spectrum) -> SpectralStats:
    """Sum, mean, max, min and population std of an eigenvalue multiset.

    The empty spectrum maps to all-zero statistics so that feature
    vectors keep a fixed length across cells.
    """
    if isinstance(spectrum, PslSpectrum):
        values = spectrum.eigenvalues
    else:
        values = np.asarray(spectrum, dtype=float)
    if values.size == 0:
        return SpectralStats(0.0, 0.0, 0.0, 0.0, 0.0)
    return SpectralStats(
        float(values.sum()),
        float(values.mean()),
        float(values.max()),
        float(values.min()),
        float(values.std()),
    )
