import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from dpmix.empirical_bayes import (GRID_HIGH, GRID_LOW, GRID_POINTS, choose_k0, estimate_a0,
                                   knee, random_allocations, sensitivity_profile,
                                   vll_derivative_a0, vll_derivative_k0, vll_profile_a0,
                                   vll_profile_k0)
from dpmix.errors import DomainError


def profile_a0_scipy(x, q0, a0):
    """VLL(a0) at a0 = b0, written against scipy's digamma."""
    m = q0.sum(axis=0)
    s = 0.5 * (q0.T @ (x * x))
    d = x.shape[1]
    lead = d * m * special.digamma(a0 + m)
    tail = np.sum(m[:, None] * np.log(a0 + s) + s * (2 * m[:, None] - s) / (a0 + s), axis=1)
    return 0.5 * float(np.sum(lead - tail))


def test_hand_example():
    x = np.array([[1.0], [-1.0]])
    value = vll_derivative_a0(x, np.ones((2, 1)), 1.0)
    assert value == pytest.approx(0.5 * (2 * special.polygamma(1, 3.0) - 0.25), abs=1e-14)
    assert value == pytest.approx(0.2699, abs=5e-5)


def test_empty_cluster_contributes_nothing(rng):
    x = rng.normal(size=(6, 3))
    q = rng.dirichlet(np.ones(2), size=6)
    padded = np.hstack([q, np.zeros((6, 1))])
    for a0 in (0.01, 1.0, 100.0):
        assert vll_derivative_a0(x, padded, a0) == pytest.approx(vll_derivative_a0(x, q, a0), abs=1e-12)
        assert vll_derivative_k0(x, padded, a0) == pytest.approx(vll_derivative_k0(x, q, a0), abs=1e-12)


def test_vanishes_for_large_a0(rng):
    x = rng.normal(size=(20, 4))
    q = rng.dirichlet(np.ones(3), size=20)
    values = np.abs(vll_derivative_a0(x, q, np.array([1e2, 1e4, 1e6, 1e8])))
    assert np.all(np.diff(values) < 0) and values[-1] < 1e-10


def test_k0_hand_example():
    x = np.array([[2.0]])
    for k0 in (0.5, 1.0, 7.0):
        assert vll_derivative_k0(x, np.ones((1, 1)), k0) == pytest.approx(-3 / (k0 + 1) ** 2)
    grid = np.geomspace(0.01, 1e3, 30)
    assert np.all(np.diff(np.abs(vll_derivative_k0(x, np.ones((1, 1)), grid))) < 0)


@pytest.mark.parametrize("fn", [vll_derivative_a0, vll_derivative_k0])
def test_domain(fn):
    with pytest.raises(DomainError):
        fn(np.ones((2, 1)), np.ones((2, 1)), 0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 30), st.integers(1, 5), st.integers(1, 6), st.floats(0.3, 4.0),
       st.integers(0, 2 ** 31))
def test_a0_finite_differences(n, d, k, scale, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(scale=scale, size=(n, d))
    q = rng.dirichlet(np.ones(k), size=n)
    for a0 in np.exp(rng.uniform(np.log(1e-2), np.log(1e4), size=5)):
        h = 1e-5 * a0
        fd = (profile_a0_scipy(x, q, a0 + h) - profile_a0_scipy(x, q, a0 - h)) / (2 * h)
        an = vll_derivative_a0(x, q, a0)
        assert abs(an - fd) <= 1e-4 * max(abs(fd), 1e-6 * np.abs(x).sum()), (a0, an, fd)
        assert vll_profile_a0(x, q, a0) == pytest.approx(profile_a0_scipy(x, q, a0), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 30), st.integers(1, 5), st.integers(1, 6), st.integers(0, 2 ** 31))
def test_k0_finite_differences(n, d, k, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, d))
    q = rng.dirichlet(np.ones(k), size=n)
    for k0 in np.exp(rng.uniform(np.log(1e-2), np.log(1e3), size=5)):
        h = 1e-5 * k0
        fd = (vll_profile_k0(x, q, k0 + h) - vll_profile_k0(x, q, k0 - h)) / (2 * h)
        an = vll_derivative_k0(x, q, k0)
        assert abs(an - fd) <= 1e-4 * max(abs(fd), 1e-8)


def test_profile_shape(rng):
    x = rng.normal(size=(30, 5))
    prof, _ = sensitivity_profile(x, draws=7, seed=1)
    assert prof.grid.shape == (GRID_POINTS,)
    assert prof.grid[0] == pytest.approx(GRID_LOW) and prof.grid[-1] == pytest.approx(GRID_HIGH)
    assert np.all(np.diff(prof.grid) > 0) and np.all(np.isfinite(prof.derivative))
    assert prof.curves.shape == (7, GRID_POINTS)
    assert np.array_equal(prof.derivative, np.median(prof.curves, axis=0))


def test_estimate_deterministic(rng):
    x = rng.normal(size=(40, 6))
    assert estimate_a0(x, 20, 3) == estimate_a0(x, 20, 3)


def test_root_case(rng):
    x = 10.0 * rng.normal(size=(50, 4))
    a0, prof = estimate_a0(x, 25, 0, return_profile=True)
    assert prof.method == "root"
    stats = [(q.sum(axis=0), q) for q in random_allocations(50, 25, 25, 0)]
    at_root = np.median([vll_derivative_a0(x, q, a0) for _, q in stats])
    ends = max(abs(prof.derivative[0]), abs(prof.derivative[-1]))
    assert abs(at_root) < 1e-6 * ends


def test_knee_case(rng):
    x = rng.normal(size=(100, 50))
    a0, prof = estimate_a0(x, 20, 0, return_profile=True)
    assert prof.method == "knee"
    assert a0 in prof.grid
    assert GRID_LOW < a0 < GRID_HIGH


def test_knee_helper():
    grid = np.geomspace(1e-3, 1e6, 60)
    u = np.log(grid)
    # piecewise-linear in log a0 with one bend at grid[30]
    values = np.where(u < u[30], 5.0 - (u - u[30]), 5.0)
    assert knee(grid, values) == grid[30]


def test_zero_data_still_informative():
    # with x = 0 the derivative is d m psi'(a0 + m) - m / a0, never flat
    a0, prof = estimate_a0(np.zeros((10, 3)), 5, 0, return_profile=True)
    assert np.all(np.isfinite(prof.derivative)) and GRID_LOW <= a0 <= GRID_HIGH


def test_draws_validated():
    with pytest.raises(ValueError):
        estimate_a0(np.ones((10, 3)), 0, 0)


@pytest.mark.parametrize("n, k0", [(72, 73), (100, 101), (1, 2)])
def test_choose_k0(n, k0):
    assert choose_k0(n) == k0
