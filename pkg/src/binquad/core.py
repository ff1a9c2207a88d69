"""Problem representations, objectives and exhaustive oracles.

Sign conventions used throughout the package:

* ``QuadraticProblem`` is always a *maximization* of ``x^T A x`` over
  ``x in {-1, +1}^n``.
* ``IsingModel`` energies follow ``E(x) = sum_a h_a x_a - sum_{ab} J_ab x_a x_b``
  with every undirected edge counted once.  A positive field therefore
  favours ``x_a = -1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

BRUTE_FORCE_MAX_N = 25


class DimensionError(ValueError):
    pass


def as_spins(x) -> np.ndarray:
    """Validate and return ``x`` as an int8 vector of +-1 entries."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError("spin state must be one-dimensional")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError("spin state entries must be exactly +1 or -1")
    return arr.astype(np.int8)


def signs(v: np.ndarray) -> np.ndarray:
    """Elementwise sign with sign(0) := +1."""
    return np.where(np.asarray(v) >= 0, 1, -1).astype(np.int8)


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        normalized = []
        seen = set()
        for a, b, w in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) out of range for n={self.n}")
            if a > b:
                a, b = b, a
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            normalized.append((a, b, float(w)))
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def m(self) -> int:
        return len(self.edges)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (tails, heads, weights) as numpy arrays."""
        if not self.edges:
            return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64),
                    np.zeros(0))
        a, b, w = zip(*self.edges)
        return np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), np.array(w, dtype=float)

    def with_weights(self, weights: Sequence[float]) -> "WeightedGraph":
        if len(weights) != self.m:
            raise DimensionError("weight vector length must equal edge count")
        return WeightedGraph(self.n, tuple((a, b, float(w)) for (a, b, _), w in zip(self.edges, weights)))

    def weight_matrix(self, sparse: bool = False):
        a, b, w = self.arrays()
        W = sp.coo_matrix((np.r_[w, w], (np.r_[a, b], np.r_[b, a])), shape=(self.n, self.n))
        return W.tocsr() if sparse else W.toarray()


@dataclass(frozen=True, eq=False)
class QuadraticProblem:
    """Maximize ``x^T A x`` over ``{-1, +1}^n``.

    ``A`` may be a dense array or a scipy sparse matrix; it must be symmetric.
    """

    A: object
    name: str = ""

    def __post_init__(self):
        A = self.A
        if sp.issparse(A):
            A = sp.csr_matrix(A, dtype=float)
            if A.shape[0] != A.shape[1]:
                raise DimensionError("A must be square")
            if (A != A.T).nnz:
                raise ValueError("A must be symmetric")
        else:
            A = np.array(A, dtype=float)
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise DimensionError("A must be square")
            if not np.array_equal(A, A.T):
                raise ValueError("A must be symmetric")
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.A)

    def dense(self) -> np.ndarray:
        return self.A.toarray() if self.is_sparse else self.A

    def matmul(self, V: np.ndarray) -> np.ndarray:
        return np.asarray(self.A @ V)

    def trace_with(self, X: np.ndarray) -> float:
        """tr(A X) for a symmetric matrix X."""
        if self.is_sparse:
            return float(self.A.multiply(X).sum())
        return float(np.sum(self.A * X))

    def factor_objective(self, V: np.ndarray) -> float:
        """tr(V^T A V)."""
        return float(np.sum(V * self.matmul(V)))


def quadratic_objective(p: QuadraticProblem, x) -> float:
    x = as_spins(x).astype(float)
    if x.shape[0] != p.n:
        raise DimensionError(f"state has length {x.shape[0]}, problem has n={p.n}")
    return float(x @ p.matmul(x))


def batch_objective(p: QuadraticProblem, X: np.ndarray) -> np.ndarray:
    """Objective of every column of an n x m matrix of +-1 states."""
    X = np.asarray(X, dtype=float)
    return np.einsum("ij,ij->j", X, p.matmul(X))


@dataclass(frozen=True, eq=False)
class IsingModel:
    graph: WeightedGraph
    h: np.ndarray
    attractive: bool = False

    def __post_init__(self):
        h = np.array(self.h, dtype=float).reshape(-1)
        if h.shape[0] != self.graph.n:
            raise DimensionError("field vector length must equal node count")
        object.__setattr__(self, "h", h)
        if self.attractive and any(w < 0 for _, _, w in self.graph.edges):
            raise ValueError("attractive model requires J >= 0 on every edge")

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def J(self) -> np.ndarray:
        return self.graph.arrays()[2]

    def is_attractive(self) -> bool:
        return bool(np.all(self.J >= 0))

    def with_params(self, J=None, h=None) -> "IsingModel":
        graph = self.graph if J is None else self.graph.with_weights(J)
        return IsingModel(graph, self.h if h is None else h, self.attractive)

    def __eq__(self, other):
        if not isinstance(other, IsingModel):
            return NotImplemented
        return (self.graph == other.graph and np.array_equal(self.h, other.h)
                and self.attractive == other.attractive)

    __hash__ = None


def energy(model: IsingModel, x) -> float:
    """Ising energy with each undirected edge counted once."""
    x = as_spins(x).astype(float)
    if x.shape[0] != model.n:
        raise DimensionError(f"state has length {x.shape[0]}, model has n={model.n}")
    a, b, J = model.graph.arrays()
    return float(model.h @ x - np.sum(J * x[a] * x[b]))


def batch_energy(model: IsingModel, X: np.ndarray) -> np.ndarray:
    """Energies of the rows of an m x n matrix of +-1 states."""
    X = np.asarray(X, dtype=float)
    a, b, J = model.graph.arrays()
    return X @ model.h - (X[:, a] * X[:, b]) @ J


def ising_to_quadratic(model: IsingModel) -> tuple[QuadraticProblem, float]:
    """Homogenize ``min E(x)`` into ``max z^T A z`` over n+1 spins.

    Node 0 is the homogenizing spin; ``-E(x) = z^T A z`` when ``z = (1, x)``.
    Use :func:`decode_homogeneous` to recover ``x``.
    """
    n = model.n
    a, b, J = model.graph.arrays()
    rows = np.r_[a + 1, b + 1, np.zeros(n, dtype=np.int64), np.arange(1, n + 1)]
    cols = np.r_[b + 1, a + 1, np.arange(1, n + 1), np.zeros(n, dtype=np.int64)]
    vals = np.r_[J / 2, J / 2, -model.h / 2, -model.h / 2]
    A = sp.coo_matrix((vals, (rows, cols)), shape=(n + 1, n + 1)).tocsr()
    A.eliminate_zeros()
    return QuadraticProblem(A, name="ising"), 0.0


def decode_homogeneous(z) -> np.ndarray:
    """Drop the homogenizing spin after fixing it to +1."""
    z = as_spins(z)
    return (z[1:] * z[0]).astype(np.int8)


@dataclass(frozen=True, eq=False)
class QuboProblem:
    """Maximize ``y^T Q y + b^T y`` over ``{0, 1}^n``."""

    Q: np.ndarray
    b: np.ndarray = field(default=None)
    name: str = ""

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise DimensionError("Q must be square")
        if not np.array_equal(Q, Q.T):
            raise ValueError("Q must be symmetric")
        b = np.zeros(Q.shape[0]) if self.b is None else np.array(self.b, dtype=float).reshape(-1)
        if b.shape[0] != Q.shape[0]:
            raise DimensionError("b must have length n")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    def value(self, y) -> float:
        y = np.asarray(y, dtype=float)
        return float(y @ self.Q @ y + self.b @ y)


@dataclass(frozen=True, eq=False)
class HomogenizedQubo:
    """A QUBO rewritten over spins: ``value(y) = x^T A x + constant``."""

    problem: QuadraticProblem
    constant: float

    @staticmethod
    def decode(x) -> np.ndarray:
        x = as_spins(x).astype(int)
        return ((1 + x[0] * x[1:]) // 2).astype(np.int8)


def qubo_to_quadratic(q: QuboProblem) -> HomogenizedQubo:
    """Convert a {0,1} QUBO to a +-1 problem with one homogenizing node.

    With ``y_i = (1 + x_0 x_i) / 2`` the QUBO value equals ``z^T A z + c``.
    """
    n = q.n
    off = q.Q - np.diag(np.diag(q.Q))
    lin = q.b + np.diag(q.Q)
    A = np.zeros((n + 1, n + 1))
    A[1:, 1:] = off / 4
    cross = (off.sum(axis=1) + lin) / 4
    A[0, 1:] = cross
    A[1:, 0] = cross
    constant = off.sum() / 4 + lin.sum() / 2
    return HomogenizedQubo(QuadraticProblem(A, name=q.name), float(constant))


def enumerate_states(n: int) -> np.ndarray:
    """All 2^n states as rows, in lexicographic order with -1 < +1."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    bits = (np.arange(2 ** n)[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return (2 * bits - 1).astype(np.int8)


def brute_force_max(p: QuadraticProblem) -> tuple[np.ndarray, float]:
    """Exhaustive maximizer; ties go to the lexicographically smallest state."""
    if p.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    A = p.dense()
    best_x, best_val = None, -np.inf
    chunk = 1 << 14
    for start in range(0, 2 ** p.n, chunk):
        idx = np.arange(start, min(start + chunk, 2 ** p.n))
        X = (2 * ((idx[:, None] >> np.arange(p.n - 1, -1, -1)) & 1) - 1).astype(float)
        vals = np.einsum("ij,ij->i", X @ A, X)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_x = float(vals[i]), X[i].astype(np.int8)
    return best_x, best_val


def potentials_to_ising(graph: WeightedGraph, theta_node, theta_edge) -> tuple[IsingModel, float]:
    """Rewrite a pairwise MRF log-potential ``U(x)`` as ``-E(x) + c``.

    ``theta_node[a]`` is indexed ``[x_a == +1]`` (index 0 is x=-1, 1 is x=+1);
    ``theta_edge[e]`` is a 2x2 table with the same indexing, in edge order.
    """
    tn = np.asarray(theta_node, dtype=float).reshape(graph.n, 2)
    te = np.asarray(theta_edge, dtype=float).reshape(graph.m, 2, 2)
    a, b, _ = graph.arrays()
    # theta(s) = c0 + c1 s; theta(s, t) = d0 + da s + db t + dab s t
    lin = (tn[:, 1] - tn[:, 0]) / 2
    const = float(np.sum((tn[:, 1] + tn[:, 0]) / 2))
    pp, mm, pm, mp = te[:, 1, 1], te[:, 0, 0], te[:, 1, 0], te[:, 0, 1]
    const += float(np.sum((pp + mm + pm + mp) / 4))
    np.add.at(lin, a, (pp + pm - mp - mm) / 4)
    np.add.at(lin, b, (pp + mp - pm - mm) / 4)
    J = (pp + mm - pm - mp) / 4
    model = IsingModel(graph.with_weights(J), -lin)
    return model, const


def edge_pairs(n: int) -> list[tuple[int, int]]:
    return list(itertools.combinations(range(n), 2))
