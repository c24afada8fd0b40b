"""External validation metrics."""

import numpy as np

from .errors import LengthMismatch


def _pairs(v):
    v = np.asarray(v, dtype=float)
    return float(np.sum(v * (v - 1.0) / 2.0))


def contingency(labels_a, labels_b):
    _, ia = np.unique(np.asarray(labels_a), return_inverse=True)
    _, ib = np.unique(np.asarray(labels_b), return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def ari(labels_a, labels_b):
    """Adjusted Rand index from the contingency table.

    Two trivial partitions (both all-one-cluster or both all-singletons)
    agree perfectly and score 1.
    """
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if labels_a.shape != labels_b.shape or labels_a.ndim != 1:
        raise LengthMismatch("partitions have lengths %s and %s"
                             % (labels_a.shape, labels_b.shape))
    if labels_a.size < 2:
        raise LengthMismatch("need at least two items")
    table = contingency(labels_a, labels_b)
    index = _pairs(table)
    sum_a = _pairs(table.sum(axis=1))
    sum_b = _pairs(table.sum(axis=0))
    total = _pairs([labels_a.size])
    expected = sum_a * sum_b / total
    max_index = 0.5 * (sum_a + sum_b)
    if max_index == expected:
        return 1.0
    return (index - expected) / (max_index - expected)


def k_post(assignments):
    """Number of distinct clusters used."""
    assignments = np.asarray(assignments)
    if assignments.size == 0:
        raise ValueError("no assignments")
    return int(np.unique(assignments).size)
