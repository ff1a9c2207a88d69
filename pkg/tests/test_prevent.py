import json

import numpy as np
import pytest

from binquad.core import IsingModel, WeightedGraph
from binquad.ising import InfectionPattern, patterns_up_to, two_mode_polytope
from binquad.prevent import (InfeasibleProjectionError, ProjectionOptions, build_projection_lp,
                             project_to_safe, synthetic_city)
from binquad.simplex import simplex_solve
from conftest import random_attractive


def k3(J, h=(1.0, 1.0, 1.0)):
    return IsingModel(WeightedGraph(3, ((0, 1, J[0]), (0, 2, J[1]), (1, 2, J[2]))), h, attractive=True)


def test_k3_projection():
    res = project_to_safe(k3((2.0, 2.0, 2.0)), patterns_up_to(3, 1))
    assert res.cost == pytest.approx(3.0, abs=1e-6)
    assert res.model.J == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)
    model, cost = res
    assert cost == res.cost


def test_k3_lp_structure():
    m0 = k3((2.0, 2.0, 2.0))
    sp = two_mode_polytope(m0.graph, patterns_up_to(3, 1))
    lp, vm = build_projection_lp(m0, sp)
    assert lp.n == vm.size == 2 * 3
    assert lp.A_ub.shape[0] == 2 * 3 + 3
    lp2, vm2 = build_projection_lp(m0, sp, ProjectionOptions(fix_h=False))
    assert lp2.n == vm2.size == 2 * (3 + 3)
    assert simplex_solve(lp).cost == pytest.approx(3.0)


def test_empty_polytope_zero_cost(rng):
    m0 = random_attractive(6, rng)
    sp = two_mode_polytope(m0.graph, [])
    lp, vm = build_projection_lp(m0, sp)
    res = simplex_solve(lp)
    assert res.cost == pytest.approx(0.0)
    assert vm.decode(res.z, m0.h)[0] == pytest.approx(m0.J)


def test_safe_model_unchanged():
    m0 = k3((0.1, 0.2, 0.3))
    res = project_to_safe(m0, patterns_up_to(3, 2))
    assert res.cost == 0 and res.model == m0 and res.verified


def test_feasibility_optimality_idempotence(rng):
    for _ in range(5):
        m0 = random_attractive(8, rng, p=0.7, h=(0.3, 1.0))
        m0 = m0.with_params(J=m0.J * 3)
        pats = patterns_up_to(8, 2)
        res = project_to_safe(m0, pats)
        sp = two_mode_polytope(m0.graph, pats)
        assert np.all(sp.slack(res.model.J, res.model.h) >= -1e-7)
        assert np.all(res.model.J >= 0)
        # every random feasible point is at least as far away
        for _ in range(1000):
            J = m0.J * rng.uniform(0, 1, m0.graph.m) * rng.uniform(0, 0.5)
            if sp.contains(J, m0.h):
                assert np.abs(J - m0.J).sum() >= res.cost - 1e-7
        # an aggregation bound: each violated single-pattern row must be closed by itself
        viol = np.maximum(0, -sp.slack(m0.J, m0.h))
        assert res.cost >= viol.max() / 2 - 1e-9
        assert project_to_safe(res.model, pats).cost == pytest.approx(0.0, abs=1e-7)


def test_full_lp_matches_row_generation(rng):
    m0 = random_attractive(7, rng, p=0.8, h=(0.3, 1.0))
    m0 = m0.with_params(J=m0.J * 3)
    pats = patterns_up_to(7, 2)
    lp, _ = build_projection_lp(m0, two_mode_polytope(m0.graph, pats))
    assert project_to_safe(m0, pats).cost == pytest.approx(simplex_solve(lp).cost, abs=1e-7)


def test_free_h_is_no_more_expensive():
    m0 = k3((2.0, 2.0, 2.0))
    fixed = project_to_safe(m0, patterns_up_to(3, 1))
    free = project_to_safe(m0, patterns_up_to(3, 1), ProjectionOptions(fix_h=False))
    assert free.cost <= fixed.cost + 1e-9


def test_infeasible_when_h_too_low():
    m0 = k3((2.0, 2.0, 2.0), h=(-1.0, -1.0, -1.0))
    with pytest.raises(InfeasibleProjectionError):
        project_to_safe(m0, patterns_up_to(3, 1))


def test_reduce_only_mode():
    m0 = k3((2.0, 0.1, 2.0))
    res = project_to_safe(m0, patterns_up_to(3, 1), ProjectionOptions(J_upper="J0"))
    assert np.all(res.model.J <= m0.J + 1e-12)


def test_report_json():
    res = project_to_safe(k3((2.0, 2.0, 2.0)), patterns_up_to(3, 1))
    rep = json.loads(res.report_json())
    assert set(rep) == {"cost", "constraints", "runtime_s", "verified", "J_delta", "h_delta"}
    assert rep["constraints"] == 3 and rep["J_delta"] == pytest.approx([-1, -1, -1])


def test_constraint_growth_and_city_cost():
    city = synthetic_city()
    costs, counts = [], []
    for k in (1, 2, 3):
        res = project_to_safe(city, patterns_up_to(20, k))
        costs.append(res.cost)
        counts.append(res.constraints)
    assert counts == [20, 210, 1350]
    assert (max(costs) - min(costs)) / min(costs) < 0.10


def test_non_attractive_rejected():
    m0 = IsingModel(WeightedGraph(2, ((0, 1, -1.0),)), [1.0, 1.0])
    with pytest.raises(ValueError):
        project_to_safe(m0, [InfectionPattern.of(0)])
