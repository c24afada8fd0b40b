"""Mean and variance of cluster occupancy counts under factorized responsibilities.

Each row of ``q`` is an independent categorical, so every count is a sum of
independent Bernoullis:

* ``N_k``     uses ``q_nk``
* ``N_{>k}``  uses ``r_nk = sum_{j>k} q_nj``
* ``N_{>=k}`` uses ``s_nk = q_nk + r_nk``

and mean/variance are ``sum p`` and ``sum p (1 - p)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

def tails(q):
    """Strict upper-tail sums ``r_nk = sum_{j>k} q_nj`` (rows of ``q``)."""
    q = np.asarray(q, dtype=float)
    rev = np.cumsum(q[..., ::-1], axis=-1)[..., ::-1]
    r = np.zeros_like(q)
    r[..., :-1] = rev[..., 1:]
    return r


@dataclass
class CountMoments:
    """Per-cluster mean/variance of ``N_k``, ``N_{>k}`` and ``N_{>=k}``.

    Arrays have length K; the object is mutable so the sweep kernel can
    update it in place.
    """

    e_eq: np.ndarray
    v_eq: np.ndarray
    e_gt: np.ndarray
    v_gt: np.ndarray
    e_ge: np.ndarray
    v_ge: np.ndarray

    @property
    def n_clusters(self):
        return self.e_eq.shape[0]

    def copy(self):
        return CountMoments(*(a.copy() for a in self.arrays()))

    def arrays(self):
        return (self.e_eq, self.v_eq, self.e_gt, self.v_gt, self.e_ge, self.v_ge)


def _bernoulli(p):
    return p.sum(axis=0), (p * (1.0 - p)).sum(axis=0)


def count_moments(q):
    """Full-data occupancy moments for responsibilities ``q`` (N x K)."""
    q = np.asarray(q, dtype=float)
    if q.ndim != 2:
        raise ValueError("q must be 2-d")
    r = tails(q)
    s = q + r
    e_eq, v_eq = _bernoulli(q)
    e_gt, v_gt = _bernoulli(r)
    e_ge, v_ge = _bernoulli(s)
    return CountMoments(e_eq, v_eq, e_gt, v_gt, e_ge, v_ge)


def row_contribution(q_row):
    """The six per-row terms a single observation adds to the moments."""
    q_row = np.asarray(q_row, dtype=float)
    r = tails(q_row)
    s = q_row + r
    return (q_row, q_row * (1 - q_row), r, r * (1 - r), s, s * (1 - s))


def leave_one_out(m, q, n):
    """Moments with observation ``n`` removed; O(K) given full-data ``m``."""
    q = np.asarray(q, dtype=float)
    if not 0 <= n < q.shape[0]:
        raise IndexError("row %d out of range for %d observations" % (n, q.shape[0]))
    out = []
    for total, part in zip(m.arrays(), row_contribution(q[n])):
        diff = total - part
        # cancellation noise only; larger negatives signal stale moments
        if np.any(diff < -1e-6 * max(1.0, float(np.max(np.abs(total))))):
            raise DomainError("leave-one-out produced a negative count moment")
        out.append(np.maximum(diff, 0.0))
    return CountMoments(*out)
