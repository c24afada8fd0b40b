"""Expected Gaussian log-density under q(mu_k) q(Sigma_k)."""

import math

import numpy as np

from ..config import CovarianceModel
from ..errors import ModelMismatch

LOG_2PI = math.log(2.0 * math.pi)


def _check(params, model):
    if model is not None and CovarianceModel.parse(model) is not params.model:
        raise ModelMismatch("parameters were built for %s, not %s"
                            % (params.model.name, CovarianceModel.parse(model).name))
    for name in ("phi", "lam", "prec", "eld"):
        if getattr(params, name) is None:
            raise ModelMismatch("parameter block %r is missing" % name)


def _trace_term(prec, lam):
    """tr(E[Sigma^-1] Lambda) per cluster for any diag/full combination."""
    if prec.ndim == 2 and lam.ndim == 2:
        return np.sum(prec * lam, axis=1)
    if prec.ndim == 2:
        return np.einsum("ki,kii->k", prec, lam)
    if lam.ndim == 2:
        return np.einsum("kii,ki->k", prec, lam)
    return np.einsum("kij,kji->k", prec, lam)


def expected_log_density(x, k, params, model=None):
    """E_q[log N(x | mu_k, Sigma_k)] for a single observation and cluster."""
    _check(params, model)
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    diff = x - params.phi[k]
    prec, lam = params.prec[k], params.lam[k]
    if prec.ndim == 1:
        quad = float(np.sum(prec * diff * diff))
    else:
        quad = float(diff @ prec @ diff)
    trace = float(_trace_term(prec[None], lam[None])[0])
    return -0.5 * d * LOG_2PI + 0.5 * float(params.eld[k]) - 0.5 * (quad + trace)


def loglik_matrix(x, params, model=None):
    """N x K matrix of expected log-densities for every observation/cluster."""
    _check(params, model)
    x = np.asarray(x, dtype=float)
    n, d = x.shape
    phi, prec = params.phi, params.prec
    const = -0.5 * d * LOG_2PI + 0.5 * params.eld - 0.5 * _trace_term(prec, params.lam)
    if prec.ndim == 2:
        # sum_i w_ki (x_ni - phi_ki)^2 expanded into matrix products
        quad = ((x * x) @ prec.T - 2.0 * x @ (prec * phi).T
                + np.sum(prec * phi * phi, axis=1)[None, :])
    elif params.shared:
        w = prec[0]
        xw = x @ w
        quad = (np.sum(xw * x, axis=1)[:, None] - 2.0 * xw @ phi.T
                + np.einsum("ki,ij,kj->k", phi, w, phi)[None, :])
    else:
        quad = np.empty((n, phi.shape[0]))
        for k in range(phi.shape[0]):
            diff = x - phi[k]
            quad[:, k] = np.sum((diff @ prec[k]) * diff, axis=1)
    return const[None, :] - 0.5 * quad
