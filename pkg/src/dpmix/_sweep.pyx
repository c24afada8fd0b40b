# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled responsibility sweep; same contract as ``_sweep_py.sweep``."""

from libc.math cimport exp, log, fabs, isfinite
from libc.stdlib cimport malloc, free


cdef inline void _row_terms(const double* qn, Py_ssize_t k, double* r) noexcept nogil:
    cdef Py_ssize_t j
    r[k - 1] = 0.0
    for j in range(k - 2, -1, -1):
        r[j] = r[j + 1] + qn[j + 1]


cdef inline void _apply(double[:, ::1] tot, const double* qn, const double* r,
                        Py_ssize_t k, double sign) noexcept nogil:
    cdef Py_ssize_t j
    cdef double p, s
    for j in range(k):
        p = qn[j]
        s = p + r[j]
        tot[0, j] += sign * p
        tot[1, j] += sign * (p * (1.0 - p))
        tot[2, j] += sign * r[j]
        tot[3, j] += sign * (r[j] * (1.0 - r[j]))
        tot[4, j] += sign * s
        tot[5, j] += sign * (s * (1.0 - s))


def sweep(double[:, ::1] loglik, double[:, ::1] q, double[:, ::1] totals,
          double alpha_mean, double alpha_var):
    cdef Py_ssize_t n_obs = q.shape[0], k = q.shape[1]
    cdef Py_ssize_t n, j, i
    cdef double max_change = 0.0, passed, top, norm, d_eq, d_ge, d_gt, own, change
    cdef double* r = <double*> malloc(k * sizeof(double))
    cdef double* score = <double*> malloc(k * sizeof(double))
    cdef double* qn
    cdef Py_ssize_t bad = -1
    if r == NULL or score == NULL:
        free(r)
        free(score)
        raise MemoryError()
    try:
        with nogil:
            for n in range(n_obs):
                qn = &q[n, 0]
                _row_terms(qn, k, r)
                _apply(totals, qn, r, k, -1.0)
                for i in range(6):
                    for j in range(k):
                        if totals[i, j] < 0.0:
                            totals[i, j] = 0.0
                passed = 0.0
                top = -1e308
                for j in range(k):
                    d_eq = 1.0 + totals[0, j]
                    d_ge = 1.0 + totals[4, j] + alpha_mean
                    d_gt = alpha_mean + totals[2, j]
                    own = (log(d_eq) - totals[1, j] / (d_eq * d_eq)
                           - log(d_ge) + (totals[5, j] + alpha_var) / (d_ge * d_ge))
                    score[j] = own + passed + loglik[n, j]
                    passed = passed + (log(d_gt) - (totals[3, j] + alpha_var) / (d_gt * d_gt)
                                       - log(d_ge) + (totals[5, j] + alpha_var) / (d_ge * d_ge))
                    if score[j] > top:
                        top = score[j]
                if not isfinite(top):
                    bad = n
                    break
                norm = 0.0
                for j in range(k):
                    score[j] = exp(score[j] - top)
                    norm = norm + score[j]
                if not (isfinite(norm) and norm > 0.0):
                    bad = n
                    break
                for j in range(k):
                    score[j] = score[j] / norm
                    change = fabs(score[j] - qn[j])
                    if change > max_change:
                        max_change = change
                    qn[j] = score[j]
                _row_terms(qn, k, r)
                _apply(totals, qn, r, k, 1.0)
    finally:
        free(r)
        free(score)
    return max_change, bad
