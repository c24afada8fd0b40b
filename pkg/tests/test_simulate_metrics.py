import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dpmix import SimSpec, ari, fit, k_post, simulate
from dpmix.config import default_hyperparams
from dpmix.errors import InputError, LengthMismatch


@pytest.mark.parametrize("family", ["gaussian", "nb"])
def test_shapes_and_labels(family):
    data = simulate(SimSpec(60, 7, 4, family=family, seed=3))
    assert data.x.shape == (60, 7)
    assert sorted(np.unique(data.labels)) == [1, 2, 3, 4]
    assert np.all(np.isfinite(data.x))


@pytest.mark.parametrize("family", ["gaussian", "nb"])
def test_deterministic(family):
    a = simulate(SimSpec(30, 5, 3, family=family, seed=11))
    b = simulate(SimSpec(30, 5, 3, family=family, seed=11))
    c = simulate(SimSpec(30, 5, 3, family=family, seed=12))
    assert np.array_equal(a.x, b.x) and np.array_equal(a.labels, b.labels)
    assert not np.array_equal(a.x, c.x)


def test_nb_standardized():
    x = simulate(SimSpec(100, 40, 3, family="nb", seed=0)).x
    assert np.allclose(x.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(x.std(axis=0), 1.0, atol=1e-9)


def test_separation_sets_center_norm():
    data = simulate(SimSpec(4000, 3, 2, separation=5.0, seed=1))
    for k in (1, 2):
        center = data.x[data.labels == k].mean(axis=0)
        assert np.linalg.norm(center) == pytest.approx(5.0, abs=0.15)


@pytest.mark.parametrize("kwargs", [dict(family="poisson"), dict(k_true=0), dict(k_true=50),
                                    dict(separation=-1.0), dict(dispersion=0.0)])
def test_spec_validation(kwargs):
    base = dict(n=10, d=2, k_true=2)
    base.update(kwargs)
    with pytest.raises(InputError):
        SimSpec(**base)


def test_ari_examples():
    assert ari([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(-0.5)
    assert ari([1, 1, 2, 2, 3], [1, 1, 2, 2, 3]) == 1.0
    assert ari([1, 1, 2, 2], [5, 5, 9, 9]) == 1.0
    assert ari([1, 1, 1], [1, 1, 1]) == 1.0


def test_ari_errors():
    with pytest.raises(LengthMismatch):
        ari([1, 2, 3], [1, 2])
    with pytest.raises(LengthMismatch):
        ari([1], [1])


def brute_ari(a, b):
    """Pair-counting ARI over all item pairs."""
    pairs = list(itertools.combinations(range(len(a)), 2))
    same_a = np.array([a[i] == a[j] for i, j in pairs], dtype=float)
    same_b = np.array([b[i] == b[j] for i, j in pairs], dtype=float)
    index, sa, sb, m = np.sum(same_a * same_b), same_a.sum(), same_b.sum(), len(pairs)
    expected = sa * sb / m
    top = 0.5 * (sa + sb)
    return 1.0 if top == expected else (index - expected) / (top - expected)


labelings = st.integers(2, 25).flatmap(
    lambda n: st.tuples(st.lists(st.integers(1, 5), min_size=n, max_size=n),
                        st.lists(st.integers(1, 5), min_size=n, max_size=n)))


@settings(max_examples=200, deadline=None)
@given(labelings)
def test_ari_matches_pair_counting(pair):
    a, b = pair
    assert ari(a, b) == pytest.approx(brute_ari(a, b), abs=1e-12)
    assert ari(a, b) == pytest.approx(ari(b, a), abs=1e-12)
    assert ari(a, b) <= 1.0 + 1e-12


@settings(max_examples=100, deadline=None)
@given(labelings, st.permutations([1, 2, 3, 4, 5]))
def test_ari_relabel_invariant(pair, perm):
    a, b = pair
    relabeled = [perm[v - 1] * 10 for v in a]
    assert ari(relabeled, b) == pytest.approx(ari(a, b), abs=1e-12)


def test_k_post():
    assert k_post([3, 3, 3]) == 1
    assert k_post([1, 4, 2, 4]) == 3
    with pytest.raises(ValueError):
        k_post([])


@pytest.mark.slow
def test_no_separation_gives_one_cluster():
    ones = 0
    for seed in range(10):
        data = simulate(SimSpec(100, 2, 3, separation=0.0, seed=seed))
        hyper = default_hyperparams("m7", 100, 2).with_(restarts=3, seed=seed)
        ones += fit(data, "m7", hyper).k_post == 1
    assert ones >= 8
