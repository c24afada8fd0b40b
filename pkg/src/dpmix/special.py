"""Digamma, trigamma and log-gamma for positive real arguments.

All three use the same scheme: push the argument above ``SHIFT`` with the
unit recurrence, then evaluate the asymptotic (Stirling-type) series.
Inputs may be scalars or arrays; scalars come back as ``float``.
"""

import math

import numpy as np

from .errors import DomainError

SHIFT = 10.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli-number coefficients B_2k / (2k), B_2k, B_2k / (2k (2k - 1)).
_DIGAMMA_COEF = (1.0 / 12, -1.0 / 120, 1.0 / 252, -1.0 / 240, 1.0 / 132,
                 -691.0 / 32760, 1.0 / 12)
_TRIGAMMA_COEF = (1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66,
                  -691.0 / 2730, 7.0 / 6)
_LGAMMA_COEF = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
                -691.0 / 360360, 1.0 / 156)


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("argument must be positive, got min %r" % (np.min(arr),))
    return arr.copy(), arr.ndim == 0


def _poly(coef, r2):
    # Horner evaluation of sum_j coef[j] * r2**j
    out = np.zeros_like(r2)
    for c in reversed(coef):
        out = out * r2 + c
    return out


def _finish(out, scalar):
    return float(out) if scalar else out


def digamma(x):
    """Logarithmic derivative of the gamma function, x > 0."""
    x, scalar = _prepare(x)
    acc = np.zeros_like(x)
    low = x < SHIFT
    while np.any(low):
        acc[low] -= 1.0 / x[low]
        x[low] += 1.0
        low = x < SHIFT
    r = 1.0 / x
    r2 = r * r
    out = acc + np.log(x) - 0.5 * r - r2 * _poly(_DIGAMMA_COEF, r2)
    return _finish(out, scalar)


def trigamma(x):
    """Second derivative of log-gamma, x > 0."""
    x, scalar = _prepare(x)
    acc = np.zeros_like(x)
    low = x < SHIFT
    while np.any(low):
        acc[low] += 1.0 / (x[low] * x[low])
        x[low] += 1.0
        low = x < SHIFT
    r = 1.0 / x
    r2 = r * r
    out = acc + r + 0.5 * r2 + r * r2 * _poly(_TRIGAMMA_COEF, r2)
    return _finish(out, scalar)


def log_gamma(x):
    """Natural log of the gamma function, x > 0."""
    x, scalar = _prepare(x)
    acc = np.zeros_like(x)
    low = x < SHIFT
    while np.any(low):
        acc[low] -= np.log(x[low])
        x[low] += 1.0
        low = x < SHIFT
    r = 1.0 / x
    r2 = r * r
    out = (acc + (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI
           + r * _poly(_LGAMMA_COEF, r2))
    return _finish(out, scalar)


def multi_log_gamma(x, d):
    """Multivariate log-gamma: log Gamma_d(x) for x > (d - 1) / 2."""
    i = np.arange(d, dtype=float)
    return 0.25 * d * (d - 1) * math.log(math.pi) + float(np.sum(log_gamma(x - 0.5 * i)))


def multi_digamma(x, d):
    """Sum_{i=1..d} digamma(x + (1 - i) / 2)."""
    i = np.arange(d, dtype=float)
    return float(np.sum(digamma(x - 0.5 * i)))
