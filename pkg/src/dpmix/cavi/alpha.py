"""Gamma variational update of the DP concentration parameter."""

import math

import numpy as np

from .state import AlphaState


def last_occupied(q):
    """1-based index of the highest cluster holding a hard assignment."""
    return int(np.max(np.argmax(q, axis=1))) + 1


def _rate_terms(moments, t, c, with_variance):
    total = 0.0
    for k in range(t - 1):
        e_ge, e_gt = c + moments.e_ge[k], c + moments.e_gt[k]
        total += math.log(e_ge) - math.log(e_gt)
        if with_variance:
            total += -moments.v_ge[k] / e_ge ** 2 + moments.v_gt[k] / e_gt ** 2
    e_t = c + moments.e_eq[t - 1]
    total += math.log(e_t) - math.log(c + 1.0)
    if with_variance:
        total -= moments.v_eq[t - 1] / e_t ** 2
    return total


def update_alpha(moments, hyper, t, alpha_prev):
    """New q(alpha) from full-data count moments and the last occupied cluster ``t``.

    The stabilizing constant inside the logarithms is the previous E[alpha]
    (``hyper.alpha_stabilizer == "expected"``) or 1 (``"one"``).  A
    non-positive rate is retried without the variance corrections; if that
    still fails the prior rate is used.
    """
    if not 1 <= t <= moments.n_clusters:
        raise ValueError("t must lie in [1, K], got %d" % t)
    c = alpha_prev.mean if hyper.alpha_stabilizer == "expected" else 1.0
    w1 = hyper.alpha_shape + t - 1
    w2 = hyper.alpha_rate + _rate_terms(moments, t, c, True)
    if not w2 > 0:
        w2 = hyper.alpha_rate + _rate_terms(moments, t, c, False)
    if not w2 > 0:
        w2 = hyper.alpha_rate
    return AlphaState(float(w1), float(w2))
