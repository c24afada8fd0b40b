import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpmix.errors import DomainError
from dpmix.moments import count_moments, leave_one_out, row_contribution, tails


def _random_q(rng, n, k):
    return rng.dirichlet(np.ones(k) * 0.7, size=n)


def brute_force(q):
    """Exact count moments by enumerating all K^N joint allocations."""
    n, k = q.shape
    out = {name: np.zeros(k) for name in ("eq", "gt", "ge")}
    sq = {name: np.zeros(k) for name in out}
    for z in itertools.product(range(k), repeat=n):
        p = np.prod(q[np.arange(n), z])
        z = np.array(z)
        for j in range(k):
            counts = {"eq": np.sum(z == j), "gt": np.sum(z > j), "ge": np.sum(z >= j)}
            for name, c in counts.items():
                out[name][j] += p * c
                sq[name][j] += p * c * c
    return {name: (out[name], sq[name] - out[name] ** 2) for name in out}


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 2 ** 31))
def test_matches_enumeration(n, k, seed):
    q = _random_q(np.random.default_rng(seed), n, k)
    m = count_moments(q)
    ref = brute_force(q)
    for name, (e, v) in (("eq", (m.e_eq, m.v_eq)), ("gt", (m.e_gt, m.v_gt)),
                         ("ge", (m.e_ge, m.v_ge))):
        assert np.allclose(e, ref[name][0], rtol=0, atol=1e-9)
        assert np.allclose(v, ref[name][1], rtol=0, atol=1e-9)


def test_deterministic_rows_have_zero_variance():
    q = np.eye(3)[[0, 0, 1, 2, 2, 2]]
    m = count_moments(q)
    assert np.array_equal(m.e_eq, [2, 1, 3])
    assert np.array_equal(m.e_gt, [4, 3, 0])
    assert np.array_equal(m.e_ge, [6, 4, 3])
    for v in (m.v_eq, m.v_gt, m.v_ge):
        assert np.all(v == 0)


def test_tails():
    assert np.allclose(tails(np.array([0.1, 0.2, 0.3, 0.4])), [0.9, 0.7, 0.4, 0.0])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(1, 8), st.integers(0, 2 ** 31))
def test_leave_one_out_equals_recount(n, k, seed):
    rng = np.random.default_rng(seed)
    q = _random_q(rng, n, k)
    m = count_moments(q)
    i = int(rng.integers(n))
    loo = leave_one_out(m, q, i)
    ref = count_moments(np.delete(q, i, axis=0))
    for a, b in zip(loo.arrays(), ref.arrays()):
        assert np.allclose(a, b, rtol=0, atol=1e-9)
        assert np.all(a >= 0)


def test_leave_one_out_errors():
    q = np.full((3, 2), 0.5)
    m = count_moments(q)
    with pytest.raises(IndexError):
        leave_one_out(m, q, 3)
    stale = count_moments(q[:1])
    with pytest.raises(DomainError):
        leave_one_out(stale, np.array([[0.0, 1.0], [1.0, 0.0]]) * 5, 0)


def test_row_contribution_sums_to_moments(rng):
    q = _random_q(rng, 7, 4)
    parts = [row_contribution(r) for r in q]
    total = [sum(p[i] for p in parts) for i in range(6)]
    for a, b in zip(total, count_moments(q).arrays()):
        assert np.allclose(a, b, atol=1e-12)
