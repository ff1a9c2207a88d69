import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from binquad.core import (DimensionError, IsingModel, QuadraticProblem, QuboProblem, WeightedGraph,
                          as_spins, batch_energy, brute_force_max, decode_homogeneous, energy,
                          enumerate_states, ising_to_quadratic, potentials_to_ising, quadratic_objective,
                          qubo_to_quadratic, signs)
from conftest import random_attractive, random_graph, random_symmetric


def two_node(J, h=(1.0, 1.0)):
    return IsingModel(WeightedGraph(2, ((0, 1, J),)), h, attractive=True)


def test_energy_examples():
    assert energy(two_node(2.0), [1, 1]) == 0.0
    assert energy(two_node(0.5), [1, -1]) == 0.5
    m = IsingModel(WeightedGraph(3, ((0, 1, 0.0), (1, 2, 0.0))), np.zeros(3))
    assert all(energy(m, x) == 0 for x in enumerate_states(3))


def test_energy_dimension_mismatch():
    with pytest.raises(DimensionError):
        energy(two_node(1.0), [1, 1, 1])


def test_quadratic_objective_examples():
    assert quadratic_objective(QuadraticProblem(np.array([[0.0, 1], [1, 0]])), [1, 1]) == 2
    assert quadratic_objective(QuadraticProblem(np.eye(4)), [1, -1, -1, 1]) == 4
    assert quadratic_objective(QuadraticProblem(np.array([[0.0, -1], [-1, 0]])), [1, -1]) == 2


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 1, 1.0), (1, 0, 2.0)))
    with pytest.raises(ValueError):
        WeightedGraph(2, ((0, 2, 1.0),))
    assert WeightedGraph(3, ((2, 0, 1.0),)).edges == ((0, 2, 1.0),)


def test_problem_must_be_symmetric():
    with pytest.raises(ValueError):
        QuadraticProblem(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_spins_validation():
    with pytest.raises(ValueError):
        as_spins([1, 0, -1])
    assert list(signs(np.array([0.0, -2.0, 3.0]))) == [1, -1, 1]


def test_brute_force_examples():
    x, v = brute_force_max(QuadraticProblem(np.array([[0.0, 1], [1, 0]])))
    assert v == 2 and list(x) == [-1, -1]
    x, v = brute_force_max(QuadraticProblem(np.array([[0.0, -1], [-1, 0]])))
    assert v == 2 and list(x) == [-1, 1]


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_max(QuadraticProblem(np.zeros((26, 26))))


def test_brute_force_dominates_samples(rng):
    p = random_symmetric(10, rng)
    x, v = brute_force_max(p)
    assert v == pytest.approx(quadratic_objective(p, x))
    for _ in range(200):
        assert quadratic_objective(p, rng.choice([-1, 1], size=10)) <= v + 1e-12


def test_enumerate_order():
    X = enumerate_states(2)
    assert X.tolist() == [[-1, -1], [-1, 1], [1, -1], [1, 1]]


def test_ising_homogenization_matches_energy(rng):
    m = random_attractive(7, rng)
    p, c = ising_to_quadratic(m)
    for x in enumerate_states(7):
        z = np.r_[1, x]
        assert quadratic_objective(p, z) + c == pytest.approx(-energy(m, x))
        assert np.array_equal(decode_homogeneous(-z), x)


def test_qubo_zero_problem():
    hq = qubo_to_quadratic(QuboProblem(np.zeros((3, 3))))
    assert np.all(hq.problem.dense() == 0) and hq.constant == 0


def _qubo_brute(q):
    best = -np.inf
    for y in itertools.product([0, 1], repeat=q.n):
        best = max(best, q.value(np.array(y)))
    return best


@given(st.integers(1, 4), st.integers(0, 2 ** 31 - 1))
def test_qubo_optimum_preserved(n, seed):
    rng = np.random.default_rng(seed)
    Q = rng.integers(-5, 6, size=(n, n)).astype(float)
    Q = Q + Q.T
    q = QuboProblem(Q, rng.integers(-5, 6, size=n))
    hq = qubo_to_quadratic(q)
    x, v = brute_force_max(hq.problem)
    assert v + hq.constant == pytest.approx(_qubo_brute(q))
    assert q.value(hq.decode(x)) == pytest.approx(_qubo_brute(q))


def test_qubo_two_node_example():
    q = QuboProblem(np.array([[0.0, 1], [1, 0]]))
    hq = qubo_to_quadratic(q)
    x, v = brute_force_max(hq.problem)
    assert q.value(hq.decode(x)) == 2 == _qubo_brute(q)


def test_potentials_zero():
    g = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0)))
    m, c = potentials_to_ising(g, np.zeros((3, 2)), np.zeros((2, 2, 2)))
    assert np.all(m.J == 0) and np.all(m.h == 0) and c == 0


def test_potentials_single_edge():
    g = WeightedGraph(2, ((0, 1, 0.0),))
    te = np.array([[[1.0, -1.0], [-1.0, 1.0]]])  # theta(s, t) = s t
    m, c = potentials_to_ising(g, np.zeros((2, 2)), te)
    assert m.J[0] == 1 and np.all(m.h == 0)


def test_potentials_exhaustive(rng):
    g = random_graph(4, 0.8, rng)
    tn = rng.normal(size=(4, 2))
    te = rng.normal(size=(g.m, 2, 2))
    m, c = potentials_to_ising(g, tn, te)
    a, b, _ = g.arrays()
    for x in enumerate_states(4):
        i = (x > 0).astype(int)
        U = tn[np.arange(4), i].sum() + te[np.arange(g.m), i[a], i[b]].sum()
        assert U == pytest.approx(-energy(m, x) + c)


@given(st.integers(0, 2 ** 31 - 1))
def test_energy_relabel_invariant(seed):
    rng = np.random.default_rng(seed)
    m = random_attractive(6, rng)
    perm = rng.permutation(6)
    inv = np.argsort(perm)
    g2 = WeightedGraph(6, tuple((int(inv[a]), int(inv[b]), w) for a, b, w in m.graph.edges))
    m2 = IsingModel(g2, m.h[perm], attractive=True)
    x = rng.choice([-1, 1], size=6)
    assert energy(m, x) == pytest.approx(energy(m2, x[perm]))


@given(st.integers(0, 2 ** 31 - 1))
def test_gauge_flip(seed):
    rng = np.random.default_rng(seed)
    m = random_attractive(6, rng)
    x = rng.choice([-1, 1], size=6)
    assert energy(m, x) == pytest.approx(energy(m.with_params(h=-m.h), -x))


def test_batch_energy_matches(rng):
    m = random_attractive(5, rng)
    X = enumerate_states(5)
    assert np.allclose(batch_energy(m, X), [energy(m, x) for x in X])


def test_attractive_flag_rejects_negative():
    with pytest.raises(ValueError):
        IsingModel(WeightedGraph(2, ((0, 1, -1.0),)), [0, 0], attractive=True)
