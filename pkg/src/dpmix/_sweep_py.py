"""Pure-Python responsibility sweep; reference for the compiled ``_sweep``."""

import math

import numpy as np


def prior_scores(e_eq, v_eq, e_gt, v_gt, e_ge, v_ge, alpha_mean, alpha_var):
    """Collapsed stick-breaking log-prior of each cluster, Taylor-corrected.

    Inputs are leave-one-out count moments (length K).
    """
    d_eq = 1.0 + e_eq
    d_ge = 1.0 + e_ge + alpha_mean
    d_gt = alpha_mean + e_gt
    own = (np.log(d_eq) - v_eq / (d_eq * d_eq)
           - np.log(d_ge) + (v_ge + alpha_var) / (d_ge * d_ge))
    step = (np.log(d_gt) - (v_gt + alpha_var) / (d_gt * d_gt)
            - np.log(d_ge) + (v_ge + alpha_var) / (d_ge * d_ge))
    passed = np.zeros_like(own)
    passed[1:] = np.cumsum(step[:-1])
    return own + passed


def _row_terms(q_row):
    k = q_row.shape[0]
    r = np.zeros(k)
    r[:-1] = np.cumsum(q_row[::-1])[::-1][1:]
    s = q_row + r
    return (q_row, q_row * (1.0 - q_row), r, r * (1.0 - r), s, s * (1.0 - s))


def sweep(loglik, q, totals, alpha_mean, alpha_var):
    """Update every row of ``q`` in index order, in place.

    ``totals`` is the 6 x K array of full-data count moments (rows: E/V of
    N_k, N_{>k}, N_{>=k}); it is kept current after each row.  Returns
    ``(max_change, bad_row)`` with ``bad_row = -1`` unless a row could not be
    normalized.
    """
    n_obs, _ = q.shape
    max_change = 0.0
    for n in range(n_obs):
        old = _row_terms(q[n])
        for i in range(6):
            totals[i] -= old[i]
        np.maximum(totals, 0.0, out=totals)
        score = prior_scores(*totals, alpha_mean, alpha_var) + loglik[n]
        top = np.max(score)
        if not math.isfinite(top):
            return max_change, n
        w = np.exp(score - top)
        norm = np.sum(w)
        if not (math.isfinite(norm) and norm > 0.0):
            return max_change, n
        new = w / norm
        change = float(np.max(np.abs(new - q[n])))
        if change > max_change:
            max_change = change
        q[n] = new
        add = _row_terms(new)
        for i in range(6):
            totals[i] += add[i]
    return max_change, -1
