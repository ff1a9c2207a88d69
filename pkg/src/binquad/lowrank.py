"""Burer-Monteiro factorization over unit-norm rows and hyperplane rounding."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import QuadraticProblem, batch_objective, signs

log = logging.getLogger(__name__)

ROW_TOL = 1e-9


class NonFiniteError(FloatingPointError):
    pass


@dataclass(frozen=True, eq=False)
class Factor:
    """n x k matrix with unit-norm rows; ``X = V V^T`` has unit diagonal."""

    V: np.ndarray

    def __post_init__(self):
        V = np.array(self.V, dtype=float)
        if V.ndim != 2 or V.shape[1] < 1:
            raise ValueError("factor must be an n x k matrix with k >= 1")
        norms = np.linalg.norm(V, axis=1)
        if np.any(np.abs(norms - 1) > ROW_TOL):
            raise ValueError("factor rows must have unit norm")
        object.__setattr__(self, "V", V)

    @property
    def n(self) -> int:
        return self.V.shape[0]

    @property
    def k(self) -> int:
        return self.V.shape[1]

    def gram(self) -> np.ndarray:
        return self.V @ self.V.T

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.V, compute_uv=False)


def normalize_rows(V: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(V, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise NonFiniteError("zero row encountered during renormalization")
    return V / norms


def random_factor(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    return normalize_rows(rng.standard_normal((n, k)))


def tangent_project(V: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Remove the radial component of every row of G."""
    return G - np.sum(G * V, axis=1, keepdims=True) * V


def spectral_norm(p: QuadraticProblem, iters: int = 100, seed: int = 0) -> float:
    """Power-iteration estimate of ||A||_2 (largest |eigenvalue|)."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(p.n)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = p.matmul(x)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        # two applications handle the +/- lambda oscillation for indefinite A
        z = p.matmul(y / ny)
        nz = np.linalg.norm(z)
        new = math.sqrt(ny * nz)
        x = z / nz
        if abs(new - est) <= 1e-10 * new:
            est = new
            break
        est = new
    return est


@dataclass
class DescentTrace:
    values: list[float] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def oblique_descent(fun: Callable[[np.ndarray], tuple[float, np.ndarray]], V0: np.ndarray, *,
                    tol: float, max_iter: int, step0: float = 1.0,
                    armijo: float = 1e-4, trace: DescentTrace | None = None) -> np.ndarray:
    """Minimize ``fun`` over matrices with unit-norm rows.

    Each step moves along the normalized projected gradient and renormalizes
    the rows; the step length adapts by backtracking so that every accepted
    step decreases the objective.  Stops when the projected gradient
    Frobenius norm drops to ``tol``.
    """
    V = V0
    f, G = fun(V)
    t = step0
    trace = trace if trace is not None else DescentTrace()
    trace.values.append(f)
    for it in range(max_iter):
        R = tangent_project(V, G)
        gnorm = float(np.linalg.norm(R))
        trace.grad_norms.append(gnorm)
        if not np.isfinite(gnorm) or not np.isfinite(f):
            raise NonFiniteError("non-finite objective or gradient")
        if gnorm <= tol:
            trace.converged = True
            break
        D = R / gnorm
        while True:
            Vn = normalize_rows(V - t * D)
            fn, Gn = fun(Vn)
            if fn <= f - armijo * t * gnorm:
                break
            t *= 0.5
            if t < 1e-16:
                # no representable decrease left along this direction
                trace.converged = True
                trace.iterations = it
                return V
        V, f, G = Vn, fn, Gn
        trace.values.append(f)
        t = min(2.0 * t, step0 * 64)
    trace.iterations = len(trace.values) - 1
    return V


@dataclass(frozen=True)
class SolveOptions:
    max_iter: int = 3000
    tol: float = 1e-7
    restarts: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0 or self.max_iter < 1 or self.restarts < 1:
            raise ValueError("tolerances and iteration caps must be positive")


@dataclass
class BMResult:
    factor: Factor
    objective: float
    trace: DescentTrace


def bm_solve(p: QuadraticProblem, k: int, opts: SolveOptions = SolveOptions()) -> BMResult:
    """Local maximizer of ``tr(V^T A V)`` over factors with unit-norm rows.

    Runs ``opts.restarts`` independent random starts (each with its own
    stream spawned from ``opts.seed``) and keeps the best.
    """
    if k < 1:
        raise ValueError("factor width must be >= 1")
    beta = max(2 * spectral_norm(p), 1e-12)
    scale = beta * math.sqrt(p.n)

    def fun(V):
        AV = p.matmul(V)
        return -float(np.sum(V * AV)), -2.0 * AV

    best = None
    for ss in np.random.SeedSequence(opts.seed).spawn(opts.restarts):
        rng = np.random.default_rng(ss)
        trace = DescentTrace()
        V = oblique_descent(fun, random_factor(p.n, k, rng), tol=opts.tol * scale,
                            max_iter=opts.max_iter, step0=1.0 / (2 * beta) * scale, trace=trace)
        obj = p.factor_objective(V)
        trace.values = [-v for v in trace.values]
        if best is None or obj > best.objective:
            best = BMResult(Factor(normalize_rows(V)), obj, trace)
    return best


def width_for(n: int) -> int:
    """Smallest k with k(k+1) >= 2n."""
    k = int(math.ceil((math.sqrt(8 * n + 1) - 1) / 2))
    while k * (k + 1) < 2 * n:
        k += 1
    return max(k, 1)


def cholesky_rows(X: np.ndarray, psd_tol: float = 1e-8) -> Factor:
    """Factor a PSD unit-diagonal matrix as ``V V^T`` with unit rows."""
    X = np.asarray(X, dtype=float)
    X = (X + X.T) / 2
    try:
        V = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        lam, Q = np.linalg.eigh(X)
        if lam[0] < -psd_tol:
            raise ValueError(f"matrix is not PSD (min eigenvalue {lam[0]:.3g})") from None
        keep = lam > 1e-10 * max(1.0, lam[-1])
        V = Q[:, keep] * np.sqrt(lam[keep])
    err = np.linalg.norm(V @ V.T - X)
    if err > 1e-6:
        raise ValueError(f"factorization error {err:.3g} exceeds 1e-6")
    return Factor(normalize_rows(V))


def gw_round(p: QuadraticProblem, f: Factor | np.ndarray, trials: int,
             rng: np.random.Generator, batch: int = 256) -> tuple[np.ndarray, float]:
    """Best of ``trials`` random-hyperplane roundings of the factor rows."""
    if trials < 1:
        raise ValueError("need at least one trial")
    V = f.V if isinstance(f, Factor) else np.asarray(f, dtype=float)
    best_x, best_val = None, -np.inf
    done = 0
    while done < trials:
        m = min(batch, trials - done)
        R = rng.standard_normal((V.shape[1], m))
        X = signs(V @ R)
        vals = batch_objective(p, X)
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val, best_x = float(vals[i]), X[:, i].copy()
        done += m
    return best_x, best_val


def psd_sqrt(X: np.ndarray) -> np.ndarray:
    """Symmetric square root of a PSD matrix (negative eigenvalues clipped)."""
    lam, U = np.linalg.eigh((X + X.T) / 2)
    return (U * np.sqrt(np.clip(lam, 0, None))) @ U.T


def gw_round_matrix(p: QuadraticProblem, X: np.ndarray, trials: int,
                    rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Hyperplane rounding of a PSD matrix through its symmetric square root.

    Rounding two nearby matrices with identically seeded generators uses the
    same Gaussian directions, so the comparison is paired.
    """
    return gw_round(p, psd_sqrt(X), trials, rng)
