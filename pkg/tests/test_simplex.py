import numpy as np
import pytest
from hypothesis import given, strategies as st

from binquad.simplex import Infeasible, LinearProgram, Optimal, Unbounded, simplex_solve
from lp_oracle import vertex_enumeration


def test_lower_bound_example():
    res = simplex_solve(LinearProgram([1.0], A_ub=[[-1.0]], b_ub=[-3.0]))
    assert isinstance(res, Optimal) and res.z[0] == pytest.approx(3.0)


def test_unbounded_example():
    assert isinstance(simplex_solve(LinearProgram([-1.0])), Unbounded)


def test_infeasible_example():
    lp = LinearProgram([1.0, 1.0], A_ub=[[1.0, 1.0]], b_ub=[-1.0])
    assert isinstance(simplex_solve(lp), Infeasible)


def test_equality_and_free_variables():
    # min x + 2y  s.t.  x + y = 1, x - y <= 0.5, y free, x in [-1, 2]
    lp = LinearProgram([1.0, 2.0], A_ub=[[1.0, -1.0]], b_ub=[0.5], A_eq=[[1.0, 1.0]], b_eq=[1.0],
                       lower=[-1.0, -np.inf], upper=[2.0, np.inf])
    res = simplex_solve(lp)
    assert res.z == pytest.approx([0.75, 0.25]) and res.cost == pytest.approx(1.25)


def test_degenerate_cycling_example():
    # Beale's classic cycling LP; Bland's rule must terminate at -1/20
    c = [-0.75, 150, -0.02, 6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    res = simplex_solve(LinearProgram(c, A, [0, 0, 1]))
    assert res.cost == pytest.approx(-0.05)


def test_validation():
    with pytest.raises(ValueError):
        LinearProgram([1.0], lower=[1.0], upper=[0.0])
    with pytest.raises(ValueError):
        LinearProgram([1.0], A_ub=[[1.0]], b_ub=[np.inf])


@given(st.integers(1, 8), st.integers(0, 8), st.integers(0, 2 ** 31 - 1))
def test_against_vertex_enumeration(n, m, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=n)
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    lo = rng.uniform(-2, 0, n)
    hi = rng.uniform(0, 2, n)
    res = simplex_solve(LinearProgram(c, A, b, lower=lo, upper=hi))
    ref = vertex_enumeration(c, A, b, lo, hi)
    if ref is None:
        assert isinstance(res, Infeasible)
    else:
        assert isinstance(res, Optimal)
        assert res.cost == pytest.approx(ref, abs=1e-7)
        assert np.all(A @ res.z <= b + 1e-7) and np.all(res.z >= lo - 1e-9) and np.all(res.z <= hi + 1e-9)


def test_against_highs(rng):
    linprog = pytest.importorskip("scipy.optimize").linprog
    for _ in range(100):
        n = int(rng.integers(2, 12))
        m = int(rng.integers(1, 15))
        c = rng.normal(size=n)
        A = rng.normal(size=(m, n))
        b = rng.uniform(0, 2, size=m)  # origin feasible
        hi = np.where(rng.random(n) < 0.5, rng.uniform(0.5, 3, n), np.inf)
        res = simplex_solve(LinearProgram(c, A, b, upper=hi))
        ref = linprog(c, A_ub=A, b_ub=b, bounds=list(zip(np.zeros(n), hi)), method="highs")
        if ref.status == 0:
            assert res.cost == pytest.approx(ref.fun, abs=1e-7)
        else:
            assert isinstance(res, Unbounded)
