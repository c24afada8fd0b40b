"""Closed-form updates of q(mu_k) and q(Sigma_k) for the eight models."""

import math

import numpy as np

from ..config import CovarianceModel
from ..errors import NotPositiveDefinite
from ..linalg import as_matrix, cholesky, inv_pd, log_det_pd
from ..special import digamma, log_gamma, multi_digamma
from .state import ClusterParams

M = CovarianceModel

# Clusters lighter than this keep their prior off-diagonal scales exactly.
MASS_EPS = 1e-10
# Above this many K*d*d entries the M7 Laplace scales are summarized, not stored.
OFFDIAG_STORE_LIMIT = 4_000_000
M8_OFFDIAG_VAR = 1e-6


def sufficient_stats(x, q):
    """Soft counts N_k and weighted sums S_k = sum_n q_nk x_n."""
    return q.sum(axis=0), q.T @ x


def _prior_precision(h, d):
    """Sigma_mu^{-1} as a (d,) diagonal when possible, else (d, d)."""
    value = np.asarray(h.mu_prior_cov, dtype=float)
    if value.ndim == 0:
        return np.full(d, 1.0 / float(value))
    m = as_matrix(value, d)
    if np.count_nonzero(m - np.diag(np.diag(m))) == 0:
        return 1.0 / np.diag(m)
    return inv_pd(m)


def _global_means(nk, s, w, p0):
    """Gaussian update of q(mu_k) under a shared precision ``w``."""
    k, d = s.shape
    if w.ndim == 1 and p0.ndim == 1:
        lam = 1.0 / (p0[None, :] + nk[:, None] * w[None, :])
        return lam * w[None, :] * s, lam
    p0m = np.diag(p0) if p0.ndim == 1 else p0
    wm = np.diag(w) if w.ndim == 1 else w
    lam = np.empty((k, d, d))
    phi = np.empty((k, d))
    ws = s @ wm
    for j in range(k):
        lam[j] = inv_pd(p0m + nk[j] * wm)
        phi[j] = lam[j] @ ws[j]
    return phi, lam


def _scatter(x, q, nk, s, phi, lam):
    """sum_k [ sum_n q_nk (x_n - phi_k)(x_n - phi_k)^T + N_k Lambda_k ]."""
    d = x.shape[1]
    cross = s.T @ phi
    out = x.T @ (x * q.sum(axis=1)[:, None]) - cross - cross.T + (phi * nk[:, None]).T @ phi
    if lam.ndim == 2:
        out += np.diag(nk @ lam)
    else:
        out += np.einsum("k,kij->ij", nk, lam)
    return 0.5 * (out + out.T) if d > 1 else out


def _wishart_expectations(nu, scale):
    d = scale.shape[-1]
    fac = cholesky(scale)
    prec = nu * fac.inverse()
    eld = multi_digamma(0.5 * nu, d) + d * math.log(2.0) - fac.log_det()
    return 0.5 * (prec + prec.T), eld


def _shared(k, prec, eld):
    prec = np.broadcast_to(prec, (k,) + np.shape(prec))
    return prec, np.full(k, float(eld))


def _update_fixed_diag(x, q, h, previous):
    k, d = q.shape[1], x.shape[1]
    nk, s = sufficient_stats(x, q)
    w = np.full(d, float(h.fixed_sigma))
    phi, lam = _global_means(nk, s, w, _prior_precision(h, d))
    prec, eld = _shared(k, w, d * math.log(h.fixed_sigma))
    return ClusterParams(M.M1_FixedDiag, phi, lam, prec, eld, shared=True)


def _update_fixed_full(x, q, h, previous):
    k, d = q.shape[1], x.shape[1]
    nk, s = sufficient_stats(x, q)
    sigma = h.matrix("fixed_cov", d)
    w = inv_pd(sigma)
    phi, lam = _global_means(nk, s, w, _prior_precision(h, d))
    prec, eld = _shared(k, w, -log_det_pd(sigma))
    return ClusterParams(M.M2_FixedFull, phi, lam, prec, eld, shared=True)


def _update_global_diag(x, q, h, previous):
    k, (n, d) = q.shape[1], x.shape
    nk, s = sufficient_stats(x, q)
    if previous is None:
        g_shape, g_rate = h.g1, h.g2
    else:
        g_shape, g_rate = previous.sigma_shape, previous.sigma_rate
    w = np.full(d, g_shape / g_rate)
    phi, lam = _global_means(nk, s, w, _prior_precision(h, d))
    trace = lam.sum(axis=1) if lam.ndim == 2 else np.trace(lam, axis1=1, axis2=2)
    sq = np.sum(x * x, axis=1) @ q
    resid = sq - 2.0 * np.sum(phi * s, axis=1) + nk * np.sum(phi * phi, axis=1) + nk * trace
    g_shape = h.g1 + 0.5 * n * d
    g_rate = h.g2 + 0.5 * float(np.sum(resid))
    prec, eld = _shared(k, np.full(d, g_shape / g_rate), d * (digamma(g_shape) - math.log(g_rate)))
    return ClusterParams(M.M3_GlobalDiag, phi, lam, prec, eld, shared=True,
                         sigma_shape=g_shape, sigma_rate=g_rate)


def _update_global_iw(x, q, h, previous):
    k, (n, d) = q.shape[1], x.shape
    nk, s = sufficient_stats(x, q)
    if previous is None:
        nu, scale = h.nu0, h.matrix("scale0", d)
    else:
        nu, scale = previous.nu, previous.scale
    w, _ = _wishart_expectations(nu, scale)
    phi, lam = _global_means(nk, s, w, _prior_precision(h, d))
    nu = h.nu0 + n
    scale = h.matrix("scale0", d) + _scatter(x, q, nk, s, phi, lam)
    w, eld = _wishart_expectations(nu, scale)
    prec, eld = _shared(k, w, eld)
    return ClusterParams(M.M4_GlobalIW, phi, lam, prec, eld, shared=True, nu=nu, scale=scale)


def _chol_diag_mean(shape, rate):
    # E[sqrt(lambda)] for lambda ~ Gamma(shape, rate)
    return np.exp(log_gamma(shape + 0.5) - log_gamma(shape)) / np.sqrt(rate)


def _chol_precision(mean, var):
    """E[L L^T] for independent entries with given means and variances."""
    return mean @ mean.T + np.diag(var.sum(axis=1))


def _update_global_cholesky(x, q, h, previous):
    """Element-wise mean-field over the Cholesky factor of the shared precision.

    q(L_ij) = N(m_ij, v_ij) for i > j and q(L_jj^2) = Gamma(g_j, r_j).  With
    S2 the scatter of ``_scatter``, the expected quadratic term is
    -1/2 sum_j sum_{i,i'} E[L_ij L_i'j] S2_ii', giving for off-diagonals

        v_ij = 1 / (1/sigma0^2 + S2_ii)
        m_ij = v_ij (mu0/sigma0^2 - sum_{i' >= j, i' != i} m_i'j S2_ii')

    swept Gauss-Seidel down each column.  For the diagonal, log det adds
    N/2 to the shape; the linear term -L_jj sum_{i>j} m_ij S2_ij is
    linearized at the current E[L_jj]:

        g_j = a0 + N/2
        r_j = b0 + S2_jj / 2 + (sum_{i>j} m_ij S2_ij) / (2 E[L_jj])

    with r_j floored at 1e-3 (b0 + S2_jj / 2) to stay a proper Gamma.
    """
    k, (n, d) = q.shape[1], x.shape
    nk, s = sufficient_stats(x, q)
    prior_var = h.sigma0_L ** 2
    if previous is None:
        shape = np.full(d, float(h.a0_L))
        rate = np.full(d, float(h.b0_L))
        diag_mean = _chol_diag_mean(shape, rate)
        mean = np.tril(np.full((d, d), float(h.mu0_L)), -1) + np.diag(diag_mean)
        var = np.tril(np.full((d, d), prior_var), -1) + np.diag(shape / rate - diag_mean ** 2)
    else:
        mean, var = previous.chol_mean.copy(), previous.chol_var.copy()
        shape, rate = previous.chol_shape.copy(), previous.chol_rate.copy()
    w = _chol_precision(mean, var)
    phi, lam = _global_means(nk, s, w, _prior_precision(h, d))
    s2 = _scatter(x, q, nk, s, phi, lam)
    shape = np.full(d, h.a0_L + 0.5 * n)
    for j in range(d):
        for i in range(j + 1, d):
            p = 1.0 / prior_var + s2[i, i]
            lin = mean[j:, j] @ s2[i, j:] - mean[i, j] * s2[i, i]
            mean[i, j] = (h.mu0_L / prior_var - lin) / p
            var[i, j] = 1.0 / p
        cross = float(mean[j + 1:, j] @ s2[j + 1:, j])
        base = h.b0_L + 0.5 * s2[j, j]
        rate[j] = max(base + cross / (2.0 * mean[j, j]), 1e-3 * base)
        mean[j, j] = _chol_diag_mean(shape[j], rate[j])
        var[j, j] = shape[j] / rate[j] - mean[j, j] ** 2
    w = _chol_precision(mean, var)
    eld = float(np.sum(digamma(shape) - np.log(rate)))
    prec, eld = _shared(k, w, eld)
    return ClusterParams(M.M5_GlobalCholesky, phi, lam, prec, eld, shared=True,
                         chol_mean=mean, chol_var=var, chol_shape=shape, chol_rate=rate)


def _update_cluster_iw(x, q, h, previous):
    k, d = q.shape[1], x.shape[1]
    nk, s = sufficient_stats(x, q)
    scale0 = h.matrix("scale0", d)
    nu = h.nu0 + 1.0 + nk
    scale = np.empty((k, d, d))
    prec = np.empty((k, d, d))
    eld = np.empty(k)
    for j in range(k):
        scale[j] = scale0 + (x * q[:, j, None]).T @ x
        scale[j] = 0.5 * (scale[j] + scale[j].T)
        try:
            prec[j], eld[j] = _wishart_expectations(nu[j], scale[j])
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite("V_%d: %s" % (j, exc)) from None
    shrink = h.k0 + nk
    lam = scale / (nu * shrink)[:, None, None]
    phi = s / shrink[:, None]
    return ClusterParams(M.M6_ClusterIW, phi, lam, prec, eld, nu=nu, scale=scale)


def _gamma_diagonals(x, q, nk, h):
    shape = np.repeat((h.a0 + nk + 1.0)[:, None], x.shape[1], axis=1)
    rate = h.b0 + 0.5 * (q.T @ (x * x))
    eld = np.sum(digamma(shape) - np.log(rate), axis=1)
    return shape, rate, eld


def laplace_scales(x, q, c0, keep=True):
    """Off-diagonal Laplace scales c_kij and their summed KL contribution.

    Returns ``(c, terms)``; ``terms[k] = sum_{i<j} log(c/c0) + 1 - c/c0``,
    the prior-minus-entropy of the off-diagonals of cluster k.  ``c`` is
    ``None`` when ``keep`` is false.
    """
    absx = np.abs(x)
    n, d = x.shape
    k = q.shape[1]
    nk = q.sum(axis=0)
    terms = np.zeros(k)
    c = np.full((k, d, d), float(c0)) if keep else None
    for j in range(k):
        if nk[j] < MASS_EPS:
            continue
        cross = (absx * q[:, j, None]).T @ absx
        u = 1.0 / (1.0 + 0.5 * c0 * cross)
        t = np.log(u) + 1.0 - u
        terms[j] = 0.5 * (float(np.sum(t)) - float(np.trace(t)))
        if keep:
            c[j] = c0 * u
    return c, terms


def _update_cluster_laplace(x, q, h, previous):
    k, d = q.shape[1], x.shape[1]
    nk, s = sufficient_stats(x, q)
    shape, rate, eld = _gamma_diagonals(x, q, nk, h)
    prec = shape / rate
    shrink = h.k0 + nk
    lam = 1.0 / (prec * shrink[:, None])
    phi = s / shrink[:, None]
    keep = k * d * d <= OFFDIAG_STORE_LIMIT
    c, terms = laplace_scales(x, q, h.c0, keep=keep)
    return ClusterParams(M.M7_ClusterLaplace, phi, lam, prec, eld, shape=shape, rate=rate,
                         offdiag=c, offdiag_kl=terms)


def _update_cluster_normal(x, q, h, previous):
    k, d = q.shape[1], x.shape[1]
    nk, s = sufficient_stats(x, q)
    shape, rate, eld = _gamma_diagonals(x, q, nk, h)
    shrink = h.k0 + nk
    prec = np.empty((k, d, d))
    lam = np.empty((k, d, d))
    terms = np.empty(k)
    off = ~np.eye(d, dtype=bool)
    for j in range(k):
        moment = (x * q[:, j, None]).T @ x
        mean = h.c0 - 0.5 * M8_OFFDIAG_VAR * moment
        terms[j] = -0.25 * float(np.sum(((mean - h.c0) ** 2)[off])) / M8_OFFDIAG_VAR
        np.fill_diagonal(mean, shape[j] / rate[j])
        prec[j] = mean
        try:
            lam[j] = inv_pd(mean) / shrink[j]
        except NotPositiveDefinite as exc:
            raise NotPositiveDefinite("E[Sigma_%d^-1]: %s" % (j, exc)) from None
    phi = s / shrink[:, None]
    return ClusterParams(M.M8_ClusterNormal, phi, lam, prec, eld, shape=shape, rate=rate,
                         offdiag_kl=terms)


_UPDATES = {
    M.M1_FixedDiag: _update_fixed_diag,
    M.M2_FixedFull: _update_fixed_full,
    M.M3_GlobalDiag: _update_global_diag,
    M.M4_GlobalIW: _update_global_iw,
    M.M5_GlobalCholesky: _update_global_cholesky,
    M.M6_ClusterIW: _update_cluster_iw,
    M.M7_ClusterLaplace: _update_cluster_laplace,
    M.M8_ClusterNormal: _update_cluster_normal,
}


def update_mu_sigma(x, q, model, hyper, previous=None):
    """One coordinate update of every q(mu_k) and q(Sigma_k).

    Global-covariance models (M3-M5) read the current q(Sigma) from
    ``previous`` (the prior when ``None``) for the mean update, then refresh
    q(Sigma) given the new means.
    """
    model = CovarianceModel.parse(model)
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if previous is not None and previous.model is not model:
        previous = None
    return _UPDATES[model](x, q, hyper, previous)
