
import numpy as np
import pytest
from hypothesis import given, strategies as st

from binquad.core import IsingModel, WeightedGraph, energy, enumerate_states
from binquad.ising import (InfectionPattern, MspConfig, StateClass, classify_state,
                           exact_polytope_membership, is_k_safe, map_attractive, map_bruteforce,
                           msp_experiment, patterns_up_to, random_attractive_model, removed_set,
                           two_mode_polytope)
from conftest import random_attractive


def two_node(J):
    return IsingModel(WeightedGraph(2, ((0, 1, J),)), [1.0, 1.0], attractive=True)


def k3(J, h=(1.0, 1.0, 1.0)):
    return IsingModel(WeightedGraph(3, ((0, 1, J[0]), (0, 2, J[1]), (1, 2, J[2]))), h, attractive=True)


@pytest.mark.parametrize("J,expected", [(2.0, [1, 1]), (0.5, [1, -1]), (1.0, [1, -1])])
def test_two_node_examples(J, expected):
    assert map_attractive(two_node(J), InfectionPattern.of(0)).tolist() == expected
    assert map_bruteforce(two_node(J), InfectionPattern.of(0)).tolist() == expected


def test_pattern_validation():
    with pytest.raises(ValueError):
        InfectionPattern(frozenset())
    with pytest.raises(IndexError):
        map_attractive(two_node(1.0), {5})


def test_non_attractive_rejected():
    m = IsingModel(WeightedGraph(2, ((0, 1, -1.0),)), [0.0, 0.0])
    with pytest.raises(ValueError):
        map_attractive(m)


def test_bruteforce_guard():
    m = IsingModel(WeightedGraph(26, ()), np.ones(26))
    with pytest.raises(ValueError):
        map_bruteforce(m)


@given(st.integers(1, 10), st.integers(0, 2 ** 31 - 1))
def test_mincut_matches_bruteforce(n, seed):
    rng = np.random.default_rng(seed)
    m = random_attractive(n, rng)
    size = int(rng.integers(0, n + 1))
    clamp = set(rng.choice(n, size=size, replace=False).tolist()) or None
    a = map_attractive(m, clamp)
    b = map_bruteforce(m, clamp)
    assert np.array_equal(a, b)


def test_bruteforce_is_minimal(rng):
    m = random_attractive(6, rng)
    x = map_bruteforce(m)
    assert energy(m, x) <= min(energy(m, y) for y in enumerate_states(6)) + 1e-12


def test_tie_rule_fewest_positive():
    # all-zero model: every state ties, fewest +1 is all -1 except clamps
    m = IsingModel(WeightedGraph(4, ((0, 1, 0.0), (2, 3, 0.0))), np.zeros(4), attractive=True)
    assert map_attractive(m, {2}).tolist() == [-1, -1, 1, -1]
    assert map_bruteforce(m, {2}).tolist() == [-1, -1, 1, -1]


def test_coupling_monotonicity(rng):
    for _ in range(20):
        m = random_attractive(8, rng)
        pat = InfectionPattern.of(int(rng.integers(8)))
        J2 = m.J.copy()
        J2[rng.integers(len(J2))] += 1.0
        before = removed_set(map_attractive(m, pat))
        after = removed_set(map_attractive(m.with_params(J=J2), pat))
        assert before <= after


def test_removed_set():
    assert removed_set([-1, -1]) == frozenset()
    assert removed_set([1, 1, 1]) == {0, 1, 2}
    assert removed_set([1, -1, 1]) == {0, 2}


def test_k_safe_examples():
    pats = [InfectionPattern.of(0), InfectionPattern.of(1)]
    assert is_k_safe(two_node(0.5), pats, 1) == (True, [1, 1])
    assert is_k_safe(two_node(2.0), pats, 1) == (False, [2, 2])
    assert is_k_safe(two_node(2.0), [], 1) == (True, [])


def test_two_mode_k3():
    g = k3((0.0, 0.0, 0.0)).graph
    sp = two_mode_polytope(g, [InfectionPattern.of(0)])
    # safety needs h1 + h2 >= J01 + J02
    assert sp.cJ.tolist() == [[-2.0, -2.0, 0.0]] and sp.ch.tolist() == [[0.0, 2.0, 2.0]]
    assert sp.contains([0.9, 0.9, 5.0], [1, 1, 1]) and not sp.contains([1.1, 1.0, 0.0], [1, 1, 1])
    full = two_mode_polytope(g, [InfectionPattern.of(0, 1, 2)])
    assert np.all(full.cJ == 0) and np.all(full.ch == 0) and full.rhs[0] == 0


def test_two_mode_matches_energy_difference(rng):
    m = random_attractive(7, rng)
    pats = patterns_up_to(7, 3)
    sp = two_mode_polytope(m.graph, pats)
    for pat, slack in zip(pats, sp.slack(m.J, m.h)):
        x = np.where(np.isin(np.arange(7), list(pat.nodes)), 1, -1)
        assert slack == pytest.approx(energy(m, np.ones(7)) - energy(m, x))


def test_constraint_counts():
    from math import comb
    g = WeightedGraph(20, ())
    for k in range(1, 5):
        assert two_mode_polytope(g, patterns_up_to(20, k)).n_constraints == sum(comb(20, j) for j in range(1, k + 1))
    assert [len(patterns_up_to(20, k)) for k in range(1, 5)] == [20, 210, 1350, 6195]


def test_exact_membership_examples():
    assert exact_polytope_membership(k3((0.1, 0.1, 0.1)), 1)
    assert not exact_polytope_membership(k3((2.0, 2.0, 2.0)), 1)
    with pytest.raises(ValueError):
        exact_polytope_membership(IsingModel(WeightedGraph(13, ()), np.ones(13)), 1)


def test_exact_membership_vs_k_safe(rng):
    for _ in range(200):
        m = k3(rng.uniform(0, 2, 3), rng.uniform(0.5, 1.5, 3))
        assert exact_polytope_membership(m, 1) == is_k_safe(m, patterns_up_to(3, 1), 1)[0]
    for _ in range(40):
        n = int(rng.integers(3, 9))
        m = random_attractive(n, rng, h=(0.5, 1.5))
        for k in (1, 2, 3):
            if exact_polytope_membership(m, k):
                assert is_k_safe(m, patterns_up_to(n, k), k)[0]
        assert exact_polytope_membership(m, 1) == is_k_safe(m, patterns_up_to(n, 1), 1)[0]


def test_classify_state():
    pat = InfectionPattern.of(0)
    assert classify_state([1, -1, -1], pat) is StateClass.POLARIZED_SAFE
    assert classify_state([1, 1, 1], pat) is StateClass.POLARIZED_ALL_INFECTED
    assert classify_state([1, 1, -1], pat) is StateClass.MIXED


def test_msp_zero_and_huge_couplings():
    rows = msp_experiment(MspConfig(n=8, edge_counts=(10,), samples=5, J_range=(0.0, 1e-12)))
    assert rows[0].mixed_count == 0
    cfg = MspConfig(n=8, edge_counts=(28,), samples=5, J_range=(50.0, 60.0))
    ss = np.random.SeedSequence(0)
    m = random_attractive_model(8, np.random.default_rng(ss), edges=28, J_range=(50.0, 60.0))
    assert all(map_attractive(m, {a}).min() == 1 for a in range(8))
    assert msp_experiment(cfg)[0].mixed_count == 0


def test_msp_paths_agree():
    base = dict(n=10, edge_counts=(12, 30), samples=10, seed=4)
    a = msp_experiment(MspConfig(**base))
    b = msp_experiment(MspConfig(**base, method="bruteforce"))
    assert [r.mixed_count for r in a] == [r.mixed_count for r in b]


def test_msp_degree_mode():
    rows = msp_experiment(MspConfig(n=10, degrees=(3, 6), samples=5))
    assert [r.param for r in rows] == [3, 6]
    assert all(0 <= r.proportion <= 1 for r in rows)


def test_random_model_distribution(rng):
    m = random_attractive_model(12, rng, edges=30)
    assert m.graph.m == 30 and np.all(m.J > 0) and np.all(m.J <= 2)
    assert np.all((m.h >= 0.5) & (m.h <= 1.5))


def test_empty_clamp_means_unclamped(rng):
    m = random_attractive(6, rng)
    assert np.array_equal(map_attractive(m, []), map_attractive(m))
    assert np.array_equal(map_bruteforce(m, ()), map_bruteforce(m, None))
