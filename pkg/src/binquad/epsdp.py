"""Entropy-penalized low-rank SDP.

Spectral entropies of ``X = V V^T`` are rank penalties that vanish exactly on
rank-one factors.  Everything is computed from the thin SVD of the n x k
factor, so a value/gradient pair costs O(n k^2).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import QuadraticProblem, brute_force_max, quadratic_objective, signs
from .lowrank import (DescentTrace, Factor, NonFiniteError, normalize_rows, oblique_descent,
                      random_factor, spectral_norm)

log = logging.getLogger(__name__)

FAMILIES = ("tsallis", "renyi", "vonneumann")
SPECTRUM_FLOOR = 1e-12
LAMBDA_GRID = (1.0, 10.0, 100.0)


@dataclass(frozen=True)
class EntropySpec:
    family: str = "tsallis"
    alpha: float = 2.0

    def __post_init__(self):
        fam = self.family.lower().replace("-", "").replace("_", "").replace(" ", "")
        aliases = {"t": "tsallis", "r": "renyi", "n": "vonneumann", "vn": "vonneumann"}
        fam = aliases.get(fam, fam)
        if fam not in FAMILIES:
            raise ValueError(f"unknown entropy family {self.family!r}")
        object.__setattr__(self, "family", fam)
        if fam != "vonneumann" and (not self.alpha > 0 or self.alpha == 1):
            raise ValueError("alpha must be positive and different from 1")


def _spectrum(V):
    U, d, Wt = np.linalg.svd(V, full_matrices=False)
    return U, d, Wt


def _entropy_from_probs(p: np.ndarray, spec: EntropySpec) -> float:
    p = p[p > SPECTRUM_FLOOR]
    if spec.family == "vonneumann":
        return float(-np.sum(p * np.log(p))) + 0.0
    power_sum = float(np.sum(p ** spec.alpha))
    if spec.family == "tsallis":
        return (power_sum - 1) / (1 - spec.alpha)
    return math.log(power_sum) / (1 - spec.alpha)


def entropy_value(f: Factor | np.ndarray, spec: EntropySpec) -> float:
    """Entropy of the normalized spectrum of ``V V^T``; zero on rank-one factors."""
    V = f.V if isinstance(f, Factor) else np.asarray(f, dtype=float)
    s = np.linalg.svd(V, compute_uv=False) ** 2
    t = s.sum()
    return _entropy_from_probs(s / t, spec)


def _entropy_and_grad(V: np.ndarray, spec: EntropySpec) -> tuple[float, np.ndarray]:
    U, d, Wt = _spectrum(V)
    s = d ** 2
    t = s.sum()
    p = s / t
    value = _entropy_from_probs(p, spec)
    pc = np.maximum(p, SPECTRUM_FLOOR)
    if spec.family == "vonneumann":
        plogp = float(np.sum(p[p > SPECTRUM_FLOOR] * np.log(p[p > SPECTRUM_FLOOR])))
        dF_ds = (-np.log(pc) + plogp) / t
    else:
        a = spec.alpha
        P = float(np.sum(p[p > SPECTRUM_FLOOR] ** a))
        dF_ds = a / (1 - a) * (pc ** (a - 1) - P) / t
        if spec.family == "renyi":
            dF_ds = dF_ds / P
    # spectral function: dF/dV = U diag(dF/dd) W^T with dF/dd = 2 d dF/ds
    grad = (U * (2 * d * dF_ds)) @ Wt
    return value, grad


def entropy_grad(f: Factor | np.ndarray, spec: EntropySpec) -> np.ndarray:
    V = f.V if isinstance(f, Factor) else np.asarray(f, dtype=float)
    return _entropy_and_grad(V, spec)[1]


def second_singular_value(f: Factor | np.ndarray) -> float:
    V = f.V if isinstance(f, Factor) else np.asarray(f, dtype=float)
    if V.shape[1] < 2:
        return 0.0
    return float(np.linalg.svd(V, compute_uv=False)[1])


def extract_rank_one(f: Factor | np.ndarray) -> np.ndarray:
    """Sign pattern of the leading left singular vector."""
    V = f.V if isinstance(f, Factor) else np.asarray(f, dtype=float)
    U, _, _ = np.linalg.svd(V, full_matrices=False)
    return signs(U[:, 0])


@dataclass(frozen=True)
class EpsdpSchedule:
    """Penalty schedule; ``lambda0=None`` picks the best start from ``LAMBDA_GRID``.

    Multipliers are dimensionless: the penalty enters as
    ``lambda * ||A||_2 * R(V)`` so one schedule serves every problem scale.
    """

    lambda0: float | None = None
    gamma: float = 1.5
    outer_tol: float = 1e-6
    inner_tol: float = 1e-7
    inner_max: int = 300
    outer_max: int = 80

    def __post_init__(self):
        if self.gamma <= 1:
            raise ValueError("gamma must exceed 1")
        if self.lambda0 is not None and self.lambda0 <= 0:
            raise ValueError("lambda0 must be positive")
        if self.outer_tol <= 0 or self.inner_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class EpsdpResult:
    factor: Factor
    state: np.ndarray
    objective: float
    lambda0: float
    sigma2: list[float] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    inner_iterations: list[int] = field(default_factory=list)
    penalized: list[list[float]] = field(default_factory=list)
    converged: bool = False

    def __iter__(self):
        # allows ``factor, state = epsdp_solve(...)``
        return iter((self.factor, self.state))


def _solve_once(p: QuadraticProblem, k: int, spec: EntropySpec, sched: EpsdpSchedule,
                lambda0: float, rng: np.random.Generator, beta: float) -> EpsdpResult:
    n = p.n
    V = random_factor(n, k, rng)
    lam = lambda0
    res = EpsdpResult(Factor(V), np.ones(n, dtype=np.int8), 0.0, lambda0)
    tol = sched.inner_tol * beta * math.sqrt(n)
    step0 = math.sqrt(n) / 2

    for _ in range(sched.outer_max):
        weight = lam * beta

        def fun(W, weight=weight):
            AW = p.matmul(W)
            r, g = _entropy_and_grad(W, spec)
            return -float(np.sum(W * AW)) + weight * r, -2.0 * AW + weight * g

        trace = DescentTrace()
        V = oblique_descent(fun, V, tol=tol, max_iter=sched.inner_max, step0=step0, trace=trace)
        if not np.all(np.isfinite(V)):
            raise NonFiniteError("non-finite factor")
        s2 = second_singular_value(V)
        res.sigma2.append(s2)
        res.lambdas.append(lam)
        res.inner_iterations.append(trace.iterations)
        res.penalized.append(trace.values)
        if s2 <= sched.outer_tol:
            res.converged = True
            break
        lam *= sched.gamma

    V = normalize_rows(V)
    res.factor = Factor(V)
    res.state = extract_rank_one(V)
    res.objective = quadratic_objective(p, res.state)
    return res


def epsdp_solve(p: QuadraticProblem, k: int = 10, spec: EntropySpec = EntropySpec(),
                sched: EpsdpSchedule = EpsdpSchedule(), seed: int = 0) -> EpsdpResult:
    """Minimize ``-tr(V^T A V) + lambda R(V)`` over unit-row factors with growing lambda.

    The outer loop multiplies lambda by ``gamma`` until the second singular
    value of V drops to ``outer_tol``; the rounded state is the sign pattern
    of the leading singular vector.
    """
    if k < 2:
        raise ValueError("factor width must be >= 2")
    beta = max(spectral_norm(p), 1e-12)
    grid = LAMBDA_GRID if sched.lambda0 is None else (sched.lambda0,)
    best = None
    for lam0, ss in zip(grid, np.random.SeedSequence(seed).spawn(len(grid))):
        res = _solve_once(p, k, spec, sched, lam0, np.random.default_rng(ss), beta)
        log.debug("lambda0=%g objective=%g outer=%d", lam0, res.objective, len(res.sigma2))
        if best is None or res.objective > best.objective:
            best = res
    return best


@dataclass
class RecoveryReport:
    recovered: bool
    gap: float
    objective: float
    optimum: float
    rank: int
    k: int

    @property
    def status(self) -> str:
        if self.rank >= self.k:
            return "full-rank"
        return "recovered" if self.recovered else "gap"


def verify_recovery(p: QuadraticProblem, k: int = 10, spec: EntropySpec = EntropySpec(),
                    sched: EpsdpSchedule = EpsdpSchedule(), seed: int = 0,
                    rank_tol: float = 1e-6) -> RecoveryReport:
    """Compare a rank-deficient EP-SDP solution with the exhaustive optimum."""
    if p.n > 16:
        raise ValueError("recovery check is limited to n <= 16")
    res = epsdp_solve(p, k, spec, sched, seed)
    rank = int(np.sum(res.factor.singular_values() > rank_tol))
    _, opt = brute_force_max(p)
    gap = opt - res.objective
    return RecoveryReport(rank < k and abs(gap) <= 1e-9 * max(1.0, abs(opt)), gap,
                          res.objective, opt, rank, k)
