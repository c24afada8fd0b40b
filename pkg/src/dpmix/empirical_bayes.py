"""Data-driven choice of the sparse-model hyperparameters a0 = b0 and k0.

The a0 estimate reads the derivative of the variational log-likelihood
(VLL) with respect to a0 = b0 at random responsibilities: the root of the
derivative when it changes sign, otherwise the knee where it flattens.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoEstimate
from .special import digamma, trigamma

GRID_LOW = 1e-3
GRID_HIGH = 1e6
GRID_POINTS = 60


@dataclass(frozen=True)
class SensitivityProfile:
    grid: np.ndarray
    derivative: np.ndarray
    draws: int
    curves: np.ndarray = None
    estimate: float = None
    method: str = None


def _cluster_stats(x, q0):
    x = np.asarray(x, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    mass = q0.sum(axis=0)                    # sum_n q_nk
    half_sq = 0.5 * (q0.T @ (x * x))         # (K, d): 1/2 sum_n q_nk x_ni^2
    lin = q0.T @ x                           # (K, d): sum_n q_nk x_ni
    return mass, half_sq, lin


def _derivative_a0(mass, half_sq, d, a0):
    a0 = np.asarray(a0, dtype=float)[..., None, None]
    m = mass[:, None]
    lead = d * mass * trigamma(a0[..., 0] + mass)
    num = a0 * m + half_sq ** 2 - m * half_sq
    tail = np.sum(num / (a0 + half_sq) ** 2, axis=-1)
    return 0.5 * np.sum(lead - tail, axis=-1)


def vll_derivative_a0(x, q0, a0):
    """d VLL / d a0 at a0 = b0 for allocation probabilities ``q0``.

    ``a0`` may be an array of grid points.
    """
    if np.any(np.asarray(a0) <= 0):
        raise DomainError("a0 must be positive")
    mass, half_sq, _ = _cluster_stats(x, q0)
    out = _derivative_a0(mass, half_sq, np.shape(x)[1], a0)
    return float(out) if np.ndim(out) == 0 else out


def vll_profile_a0(x, q0, a0):
    """VLL(a0), up to an a0-free constant; its derivative is ``vll_derivative_a0``.

    Expected log precision from Gamma(a0 + m_k, a0 + s_ki) with
    s_ki = 1/2 sum_n q_nk x_ni^2, plus the matching quadratic term
    -s (2 m - s) / (2 (a0 + s)).
    """
    if np.any(np.asarray(a0) <= 0):
        raise DomainError("a0 must be positive")
    mass, half_sq, _ = _cluster_stats(x, q0)
    d = np.shape(x)[1]
    m = mass[:, None]
    lead = d * mass * digamma(a0 + mass)
    tail = np.sum(m * np.log(a0 + half_sq) + half_sq * (2 * m - half_sq) / (a0 + half_sq),
                  axis=1)
    return 0.5 * float(np.sum(lead - tail))


def vll_derivative_k0(x, q0, k0):
    """d VLL / d k0 for allocation probabilities ``q0``."""
    if np.any(np.asarray(k0) <= 0):
        raise DomainError("k0 must be positive")
    mass, _, lin = _cluster_stats(x, q0)
    d = np.shape(x)[1]
    sq = np.sum(lin ** 2, axis=1)
    k0 = np.asarray(k0, dtype=float)[..., None]
    out = np.sum((d * mass - (2.0 - mass) * sq) / (k0 + mass) ** 2, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def vll_profile_k0(x, q0, k0):
    """VLL(k0) up to a constant, matching ``vll_derivative_k0``."""
    if np.any(np.asarray(k0) <= 0):
        raise DomainError("k0 must be positive")
    mass, _, lin = _cluster_stats(x, q0)
    d = np.shape(x)[1]
    sq = np.sum(lin ** 2, axis=1)
    return -float(np.sum((d * mass - (2.0 - mass) * sq) / (k0 + mass)))


def random_allocations(n, k, draws, seed):
    rng = np.random.default_rng(seed)
    return [rng.dirichlet(np.ones(k), size=n) for _ in range(draws)]


def knee(grid, values):
    """Grid point of largest discrete second difference in log-grid coordinates."""
    lg = np.log(grid)
    h = np.diff(lg)
    # non-uniform second difference; reduces to the plain one on a log-uniform grid
    second = 2.0 * ((values[2:] - values[1:-1]) / h[1:] - (values[1:-1] - values[:-2]) / h[:-1]) \
        / (h[1:] + h[:-1])
    return float(grid[1 + int(np.argmax(second))])


def sensitivity_profile(x, draws=100, seed=0, n_clusters=None, grid=None):
    """Median derivative curve over ``draws`` random allocations."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    k = n_clusters or min(n, 25)
    grid = np.geomspace(GRID_LOW, GRID_HIGH, GRID_POINTS) if grid is None else np.asarray(grid)
    stats = [_cluster_stats(x, q0)[:2] for q0 in random_allocations(n, k, draws, seed)]
    curves = np.array([_derivative_a0(m, s, x.shape[1], grid) for m, s in stats])
    median = np.median(curves, axis=0)
    return SensitivityProfile(grid, median, draws, curves), stats


def estimate_a0(x, draws=100, seed=0, n_clusters=None, return_profile=False):
    """Estimate a0 = b0: median-curve root if it changes sign, else its knee."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    profile, stats = sensitivity_profile(x, draws, seed, n_clusters)
    grid, med = profile.grid, profile.derivative
    d = np.shape(x)[1]
    if not np.any(med != 0):
        raise NoEstimate("derivative curve is identically zero")

    def median_at(a0):
        return float(np.median([_derivative_a0(m, s, d, a0) for m, s in stats]))

    sign = np.sign(med)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if flips.size:
        i = int(flips[0])
        value = brentq(median_at, grid[i], grid[i + 1], xtol=1e-12, rtol=1e-6 * 1e-2)
        method = "root"
    else:
        value = knee(grid, med)
        method = "knee"
    profile = SensitivityProfile(grid, med, draws, profile.curves, value, method)
    return (value, profile) if return_profile else value


def choose_k0(n):
    """k0 = N + 1: the mean prior weighs as much as the whole sample plus one."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return float(n + 1)
