"""Dense symmetric-matrix helpers built on LAPACK through numpy."""

from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite

PIVOT_RTOL = 1e-12


def as_symmetric(m, atol=0.0):
    """Return ``m`` as a float array, mirroring the lower triangle.

    Raises ``ValueError`` if ``m`` is not square or asymmetric beyond ``atol``.
    """
    m = np.array(m, dtype=float, ndmin=2)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (m.shape,))
    if atol >= 0 and np.max(np.abs(m - m.T), initial=0.0) > atol:
        raise ValueError("matrix is not symmetric")
    low = np.tril(m)
    return low + np.tril(m, -1).T


@dataclass(frozen=True)
class CholeskyFactor:
    lower: np.ndarray

    @property
    def dim(self):
        return self.lower.shape[0]

    def reconstruct(self):
        return self.lower @ self.lower.T

    def log_det(self):
        return 2.0 * float(np.sum(np.log(np.diag(self.lower))))

    def inverse(self):
        eye = np.eye(self.dim)
        inv_l = np.linalg.solve(self.lower, eye)
        return inv_l.T @ inv_l


def cholesky(m):
    """Lower Cholesky factor of a symmetric positive-definite matrix.

    Raises
    ------
    NotPositiveDefinite
        If LAPACK rejects the matrix or any squared pivot is at most
        ``1e-12`` times the largest diagonal entry.
    """
    m = as_symmetric(m, atol=-1.0)
    scale = float(np.max(np.diag(m))) if m.size else 0.0
    if not scale > 0:
        raise NotPositiveDefinite("non-positive diagonal")
    try:
        lower = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from None
    pivots = np.diag(lower) ** 2
    if not np.all(pivots > PIVOT_RTOL * scale):
        raise NotPositiveDefinite("pivot below %g of max diagonal" % PIVOT_RTOL)
    return CholeskyFactor(lower)


def log_det_pd(m):
    """log det of a positive-definite matrix, via its Cholesky factor."""
    return cholesky(m).log_det()


def inv_pd(m):
    """Inverse of a positive-definite matrix, symmetrized."""
    inv = cholesky(m).inverse()
    return 0.5 * (inv + inv.T)


def as_matrix(value, d):
    """Expand scalar shorthand ``c`` to ``c * I`` (d x d); pass matrices through."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(d)
    if arr.shape != (d, d):
        raise ValueError("expected a %dx%d matrix, got %s" % (d, d, arr.shape))
    return arr
