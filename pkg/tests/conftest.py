import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from binquad.core import IsingModel, QuadraticProblem, WeightedGraph

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_graph(n, p, rng, weights=(0.0, 2.0)):
    edges = tuple((a, b, float(rng.uniform(*weights)))
                  for a, b in itertools.combinations(range(n), 2) if rng.random() < p)
    return WeightedGraph(n, edges)


def random_symmetric(n, rng):
    A = rng.normal(size=(n, n))
    return QuadraticProblem((A + A.T) / 2)


def random_attractive(n, rng, p=0.5, h=(-1.0, 1.0)):
    g = random_graph(n, p, rng, weights=(0.05, 2.0))
    return IsingModel(g, rng.uniform(*h, size=n), attractive=True)


def random_psd_unit_diag(n, k, rng):
    V = rng.normal(size=(n, k))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    X = V @ V.T
    np.fill_diagonal(X, 1.0)
    return X


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records one PASS/FAIL line for the summary."""
    def record(n, ok, detail):
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[n] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
