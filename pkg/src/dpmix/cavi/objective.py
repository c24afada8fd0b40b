"""Evidence lower bound and variational log-likelihood."""

import math

import numpy as np

from ..config import CovarianceModel
from ..linalg import as_matrix, cholesky, log_det_pd
from ..moments import count_moments
from ..special import digamma, log_gamma, multi_digamma, multi_log_gamma, trigamma
from .density import loglik_matrix
from .updates import _prior_precision

M = CovarianceModel


def vll(x, q, params, loglik=None):
    """sum_n sum_k q_nk E_q[log p(x_n | mu_k, Sigma_k)]."""
    if loglik is None:
        loglik = loglik_matrix(x, params)
    return float(np.sum(q * loglik))


def kl_gamma(a, b, a0, b0):
    """KL(Gamma(a, b) || Gamma(a0, b0)), rate parameterization, elementwise."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return ((a - a0) * digamma(a) - log_gamma(a) + log_gamma(a0)
            + a0 * (np.log(b) - math.log(b0)) + a * (b0 - b) / b)


def kl_wishart_scale(nu, scale, nu0, scale0):
    """KL(IW(nu, V) || IW(nu0, V0)) (equal to the KL of the Wishart precisions)."""
    d = scale.shape[0]
    fac = cholesky(scale)
    ratio = scale0 @ fac.inverse()
    return (-0.5 * nu0 * (log_det_pd(scale0) - fac.log_det())
            + 0.5 * nu * (np.trace(ratio) - d)
            + multi_log_gamma(0.5 * nu0, d) - multi_log_gamma(0.5 * nu, d)
            + 0.5 * (nu - nu0) * multi_digamma(0.5 * nu, d))


def _log_expect(mean, var):
    # second-order delta method for E[log X]
    return np.log(mean) - 0.5 * var / (mean * mean)


def _lgamma_expect(mean, var):
    return log_gamma(mean) + 0.5 * trigamma(mean) * var


def allocation_prior(moments, alpha):
    """Delta-method E_q[log p(Z | alpha)] for the collapsed stick-breaking prior.

    Each factor alpha Gamma(1+N_k) Gamma(alpha+N_{>k}) / Gamma(1+alpha+N_{>=k})
    is rewritten with Gamma(1+y) = y Gamma(y) so that empty clusters
    contribute exactly zero.
    """
    ea, va = alpha.mean, alpha.var
    ge_mean, ge_var = ea + moments.e_ge, va + moments.v_ge
    gt_mean, gt_var = ea + moments.e_gt, va + moments.v_gt
    terms = (_log_expect(ea, va) - _log_expect(ge_mean, ge_var)
             + _lgamma_expect(1.0 + moments.e_eq, moments.v_eq)
             + _lgamma_expect(gt_mean, gt_var) - _lgamma_expect(ge_mean, ge_var))
    return float(np.sum(terms))


def allocation_entropy(q):
    mask = q > 0
    return float(-np.sum(q[mask] * np.log(q[mask])))


def _logdet_rows(lam):
    if lam.ndim == 2:
        return np.sum(np.log(lam), axis=1)
    return np.array([log_det_pd(m) for m in lam])


def _quad_trace(prec, phi, lam):
    """phi^T W phi + tr(W Lambda) per cluster."""
    if prec.ndim == 2:
        quad = np.sum(prec * phi * phi, axis=1)
        tr = np.sum(prec * lam, axis=1) if lam.ndim == 2 else np.einsum("ki,kii->k", prec, lam)
    else:
        quad = np.einsum("ki,kij,kj->k", phi, prec, phi)
        tr = (np.einsum("kii,ki->k", prec, lam) if lam.ndim == 2
              else np.einsum("kij,kji->k", prec, lam))
    return quad + tr


def mean_terms(params, hyper):
    """E log p(mu) + H[q(mu)] summed over clusters (d/2 log-2pi terms cancel)."""
    d = params.dim
    half_logdet_lam = 0.5 * _logdet_rows(params.lam)
    if params.model.cluster_cov:
        # mu_k | Sigma_k ~ N(0, Sigma_k / k0)
        qt = _quad_trace(params.prec, params.phi, params.lam)
        per = (0.5 * d * math.log(hyper.k0) + 0.5 * params.eld - 0.5 * hyper.k0 * qt
               + half_logdet_lam + 0.5 * d)
        return float(np.sum(per))
    p0 = _prior_precision(hyper, d)
    if p0.ndim == 1:
        logdet_prior = -float(np.sum(np.log(p0)))
        wide = np.broadcast_to(p0, params.phi.shape)
    else:
        logdet_prior = log_det_pd(as_matrix(hyper.mu_prior_cov, d))
        wide = np.broadcast_to(p0, (params.n_clusters, d, d))
    qt = _quad_trace(wide, params.phi, params.lam)
    per = -0.5 * logdet_prior - 0.5 * qt + half_logdet_lam + 0.5 * d
    return float(np.sum(per))


def covariance_terms(params, hyper):
    """E log p(Sigma) - E log q(Sigma) (negative KL) for the covariance block."""
    model = params.model
    d = params.dim
    if model.fixed:
        return 0.0
    if model is M.M3_GlobalDiag:
        return -float(kl_gamma(params.sigma_shape, params.sigma_rate, hyper.g1, hyper.g2))
    if model is M.M4_GlobalIW:
        return -float(kl_wishart_scale(params.nu, params.scale, hyper.nu0,
                                       as_matrix(hyper.scale0, d)))
    if model is M.M5_GlobalCholesky:
        low = np.tril_indices(d, -1)
        m, v = params.chol_mean[low], params.chol_var[low]
        s2 = hyper.sigma0_L ** 2
        kl_off = 0.5 * (np.log(s2 / v) + (v + (m - hyper.mu0_L) ** 2) / s2 - 1.0)
        kl_diag = kl_gamma(params.chol_shape, params.chol_rate, hyper.a0_L, hyper.b0_L)
        return -float(np.sum(kl_off) + np.sum(kl_diag))
    if model is M.M6_ClusterIW:
        scale0 = as_matrix(hyper.scale0, d)
        return -float(sum(kl_wishart_scale(params.nu[k], params.scale[k], hyper.nu0, scale0)
                          for k in range(params.n_clusters)))
    # M7 / M8: Gamma diagonals plus the off-diagonal block summary
    kl_diag = kl_gamma(params.shape, params.rate, hyper.a0, hyper.b0)
    return -float(np.sum(kl_diag)) + float(np.sum(params.offdiag_kl))


def elbo(x, q, params, alpha, hyper, loglik=None, moments=None):
    """Evidence lower bound of the current state (delta-method allocation prior)."""
    if loglik is None:
        loglik = loglik_matrix(x, params)
    if moments is None:
        moments = count_moments(q)
    value = vll(x, q, params, loglik)
    value += allocation_prior(moments, alpha) + allocation_entropy(q)
    value -= float(kl_gamma(alpha.w1, alpha.w2, hyper.alpha_shape, hyper.alpha_rate))
    value += mean_terms(params, hyper) + covariance_terms(params, hyper)
    return value
