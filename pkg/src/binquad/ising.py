"""Clamped MAP inference for attractive Ising models and safety geometry.

Spins are +1 (infected / removed) and -1 (healthy).  The energy counts each
edge once: ``E(x) = sum_a h_a x_a - sum_(a,b) J_ab x_a x_b``.
"""

from __future__ import annotations

import enum
import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import IsingModel, WeightedGraph, as_spins, batch_energy, enumerate_states
from .maxflow import INF, FlowNetwork

log = logging.getLogger(__name__)

BRUTE_FORCE_MAX_N = 25
EXACT_POLYTOPE_MAX_N = 12
MARGIN = 1e-9


@dataclass(frozen=True)
class InfectionPattern:
    """Set of initially infected nodes, clamped to +1."""

    nodes: frozenset

    def __post_init__(self):
        nodes = frozenset(int(a) for a in self.nodes)
        if not nodes:
            raise ValueError("infection pattern must be nonempty")
        if min(nodes) < 0:
            raise ValueError("node indices must be non-negative")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def of(cls, *nodes: int) -> "InfectionPattern":
        return cls(frozenset(nodes))

    def check(self, n: int) -> None:
        if max(self.nodes) >= n:
            raise IndexError(f"pattern node {max(self.nodes)} out of range for n={n}")

    def __len__(self):
        return len(self.nodes)


def patterns_up_to(n: int, k: int) -> list[InfectionPattern]:
    """All patterns of size 1..k, ordered by size then lexicographically."""
    return [InfectionPattern(frozenset(c)) for r in range(1, k + 1)
            for c in itertools.combinations(range(n), r)]


class StateClass(enum.Enum):
    POLARIZED_SAFE = "polarized-safe"
    POLARIZED_ALL_INFECTED = "polarized-all-infected"
    MIXED = "mixed"


def _clamp_set(clamp, n) -> frozenset:
    if clamp is None:
        return frozenset()
    if not isinstance(clamp, InfectionPattern):
        nodes = frozenset(clamp)
        if not nodes:
            return nodes
        clamp = InfectionPattern(nodes)
    clamp.check(n)
    return clamp.nodes


def map_attractive(m: IsingModel, clamp: InfectionPattern | Iterable[int] | None = None) -> np.ndarray:
    """Exact clamped MAP state of an attractive model via s-t min-cut.

    The source side is the +1 set.  The residual-reachable source set is the
    smallest minimum cut, so ties resolve toward fewer +1 entries.
    """
    if not m.is_attractive():
        raise ValueError("map_attractive requires J >= 0 on every edge")
    n = m.n
    fixed = _clamp_set(clamp, n)
    s, t = n, n + 1
    net = FlowNetwork(n + 2)
    a_idx, b_idx, J = m.graph.arrays()
    caps = [abs(v) for v in m.h] + [v for v in J]
    scale = max([c for c in caps if c > 0], default=1.0)
    for a, h in enumerate(m.h):
        # unary h x: +1 costs 2h more than -1 (after shifting by a constant)
        if h > 0:
            net.add_edge(a, t, 2 * h)
        elif h < 0:
            net.add_edge(s, a, -2 * h)
    for a in fixed:
        net.add_edge(s, a, INF)
    for a, b, w in zip(a_idx, b_idx, J):
        if w > 0:
            net.add_edge(int(a), int(b), 2 * w, 2 * w)
    net.max_flow(s, t, tol=1e-12 * scale)
    side = net.source_side(s)
    return np.where(np.array(side[:n]), 1, -1).astype(np.int8)


def _tie_key(X: np.ndarray) -> np.ndarray:
    """Sort key rank: fewer +1 first, then lexicographic with -1 < +1."""
    return np.lexsort(tuple(X[:, j] for j in range(X.shape[1] - 1, -1, -1)) + ((X > 0).sum(1),))


def map_bruteforce(m: IsingModel, clamp: InfectionPattern | Iterable[int] | None = None,
                   tol: float = 1e-9) -> np.ndarray:
    """Exhaustive clamped MAP with the same tie rule as :func:`map_attractive`.

    Energies within ``tol`` (relative to the energy scale) count as ties.
    """
    n = m.n
    if n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}")
    fixed = sorted(_clamp_set(clamp, n))
    free = [a for a in range(n) if a not in set(fixed)]
    scale = 1.0 + float(np.sum(np.abs(m.h)) + np.sum(np.abs(m.J)))
    best_e = np.inf
    cands = []
    chunk = 1 << 14
    total = 1 << len(free)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        F = (2 * ((idx[:, None] >> np.arange(len(free) - 1, -1, -1)) & 1) - 1).astype(np.int8)
        X = np.ones((len(idx), n), dtype=np.int8)
        X[:, free] = F
        E = batch_energy(m, X)
        emin = float(E.min())
        if emin < best_e - tol * scale:
            best_e = emin
            cands = [X[E <= emin + tol * scale]]
        elif emin <= best_e + tol * scale:
            best_e = min(best_e, emin)
            cands.append(X[E <= best_e + tol * scale])
    X = np.concatenate(cands)
    E = batch_energy(m, X)
    X = X[E <= E.min() + tol * scale]
    return X[_tie_key(X)[0]].astype(np.int8)


def removed_set(x) -> frozenset:
    x = as_spins(x)
    return frozenset(int(a) for a in np.flatnonzero(x > 0))


def is_k_safe(m: IsingModel, patterns: Sequence[InfectionPattern], k: int) -> tuple[bool, list[int]]:
    """Whether every pattern's clamped MAP removes at most ``k`` nodes; also the sizes."""
    sizes = [len(removed_set(map_attractive(m, pat))) for pat in patterns]
    return all(s <= k for s in sizes), sizes


@dataclass
class SafePolytope:
    """Constraints ``cJ[i] @ J + ch[i] @ h >= rhs[i]`` over a fixed graph."""

    graph: WeightedGraph
    cJ: np.ndarray
    ch: np.ndarray
    rhs: np.ndarray
    tags: list = field(default_factory=list)

    def __post_init__(self):
        self.rhs = np.asarray(self.rhs, dtype=float).reshape(-1)
        rows = self.rhs.shape[0]
        self.cJ = np.asarray(self.cJ, dtype=float).reshape(rows, self.graph.m)
        self.ch = np.asarray(self.ch, dtype=float).reshape(rows, self.graph.n)

    @property
    def n_constraints(self) -> int:
        return self.rhs.shape[0]

    def slack(self, J, h) -> np.ndarray:
        return self.cJ @ np.asarray(J, dtype=float) + self.ch @ np.asarray(h, dtype=float) - self.rhs

    def contains(self, J, h, tol: float = 1e-9) -> bool:
        return bool(np.all(self.slack(J, h) >= -tol))


def two_mode_polytope(g: WeightedGraph, patterns: Sequence[InfectionPattern]) -> SafePolytope:
    """One constraint per pattern: the pattern-only state beats the all-infected state.

    ``E(all +1) - E(x^I) = 2 sum_{b not in I} h_b - 2 sum_{cut(I)} J_ab >= 0``.
    """
    a, b, _ = g.arrays()
    cJ = np.zeros((len(patterns), g.m))
    ch = np.zeros((len(patterns), g.n))
    for i, pat in enumerate(patterns):
        pat.check(g.n)
        inside = np.zeros(g.n, dtype=bool)
        inside[list(pat.nodes)] = True
        cJ[i, inside[a] != inside[b]] = -2.0
        ch[i, ~inside] = 2.0
    return SafePolytope(g, cJ, ch, np.zeros(len(patterns)), list(patterns))


def exact_polytope_membership(m: IsingModel, k: int, margin: float = MARGIN) -> bool:
    """For every R with 1 <= |R| <= k, ``x^(R)`` strictly beats each state agreeing on R.

    The strict inequality is realized as a ``margin`` gap.
    """
    n = m.n
    if n > EXACT_POLYTOPE_MAX_N:
        raise ValueError(f"exact membership limited to n <= {EXACT_POLYTOPE_MAX_N}")
    X = enumerate_states(n)
    E = batch_energy(m, X)
    plus = X > 0
    # row index of a state from its +1 mask: bits are in order a = 0..n-1 (MSB first)
    weights = 1 << np.arange(n - 1, -1, -1)
    for r in range(1, min(k, n) + 1):
        for R in itertools.combinations(range(n), r):
            agree = plus[:, list(R)].all(axis=1)
            xr = int(weights[list(R)].sum())
            others = E[agree & (np.arange(len(E)) != xr)]
            if others.size and not np.all(E[xr] < others - margin):
                return False
    return True


def classify_state(x, pattern: InfectionPattern | Iterable[int]) -> StateClass:
    pos = removed_set(x)
    nodes = pattern.nodes if isinstance(pattern, InfectionPattern) else frozenset(pattern)
    if pos == nodes:
        return StateClass.POLARIZED_SAFE
    if len(pos) == len(as_spins(x)):
        return StateClass.POLARIZED_ALL_INFECTED
    return StateClass.MIXED


@dataclass(frozen=True)
class MspConfig:
    """Random attractive ensembles; exactly one of ``edge_counts`` / ``degrees`` is used."""

    n: int = 20
    edge_counts: tuple = (30, 50, 70, 90, 110, 130, 150, 170, 190)
    degrees: tuple | None = None
    samples: int = 200
    J_range: tuple = (0.0, 2.0)
    h_range: tuple = (0.5, 1.5)
    seed: int = 0
    method: str = "mincut"
    workers: int = 1

    def __post_init__(self):
        if self.method not in ("mincut", "bruteforce"):
            raise ValueError("method must be 'mincut' or 'bruteforce'")
        if self.method == "bruteforce" and self.n > BRUTE_FORCE_MAX_N:
            raise ValueError(f"brute-force path limited to n <= {BRUTE_FORCE_MAX_N}")
        max_m = self.n * (self.n - 1) // 2
        if self.degrees is None and any(not 0 <= M <= max_m for M in self.edge_counts):
            raise ValueError(f"edge counts must lie in [0, {max_m}]")
        if self.samples < 1:
            raise ValueError("need at least one sample")

    @property
    def params(self) -> tuple:
        return tuple(self.degrees) if self.degrees is not None else tuple(self.edge_counts)


@dataclass
class MspRow:
    param: int
    samples: int
    mixed_count: int
    proportion: float
    seed: int


def _uniform_open_left(rng, lo, hi, size):
    # U(lo, hi]: flip the half-open interval numpy draws from
    return hi - (hi - lo) * rng.random(size)


def random_attractive_model(n: int, rng: np.random.Generator, *, edges: int | None = None,
                            degree: int | None = None, J_range=(0.0, 2.0),
                            h_range=(0.5, 1.5)) -> IsingModel:
    """G(n, M) or random d-regular graph with J ~ U(J_range] and h ~ U[h_range]."""
    if degree is not None:
        import networkx as nx

        G = nx.random_regular_graph(degree, n, seed=int(rng.integers(2 ** 31)))
        pairs = sorted((min(u, v), max(u, v)) for u, v in G.edges())
    else:
        all_pairs = list(itertools.combinations(range(n), 2))
        pick = np.sort(rng.choice(len(all_pairs), size=edges, replace=False))
        pairs = [all_pairs[i] for i in pick]
    J = _uniform_open_left(rng, J_range[0], J_range[1], len(pairs))
    h = rng.uniform(h_range[0], h_range[1], n)
    g = WeightedGraph(n, tuple((a, b, float(w)) for (a, b), w in zip(pairs, J)))
    return IsingModel(g, h, attractive=True)


def _msp_sample(args) -> int:
    cfg, param, ss = args
    rng = np.random.default_rng(ss)
    if cfg.degrees is not None:
        m = random_attractive_model(cfg.n, rng, degree=param, J_range=cfg.J_range, h_range=cfg.h_range)
    else:
        m = random_attractive_model(cfg.n, rng, edges=param, J_range=cfg.J_range, h_range=cfg.h_range)
    solve = map_attractive if cfg.method == "mincut" else map_bruteforce
    mixed = 0
    for a in range(cfg.n):
        pat = InfectionPattern.of(a)
        mixed += classify_state(solve(m, pat), pat) is StateClass.MIXED
    return mixed


def msp_experiment(cfg: MspConfig = MspConfig()) -> list[MspRow]:
    """Mixed-state proportion per graph-size parameter.

    Every sample contributes one MAP state per single-node pattern, so the
    proportion is ``mixed_count / (samples * n)``.
    """
    rows = []
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(cfg.params))
    for param, ss in zip(cfg.params, seeds):
        jobs = [(cfg, param, child) for child in ss.spawn(cfg.samples)]
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                counts = list(pool.map(_msp_sample, jobs))
        else:
            counts = [_msp_sample(j) for j in jobs]
        mixed = int(sum(counts))
        rows.append(MspRow(int(param), cfg.samples, mixed, mixed / (cfg.samples * cfg.n), cfg.seed))
        log.info("param=%s mixed=%d", param, mixed)
    return rows
