"""Projection-free rank minimization over unit-diagonal PSD matrices.

The descent variable is the strict upper triangle of a symmetric matrix with
unit diagonal, so symmetry and ``diag X = 1`` hold by construction.  Step
sizes certified by :meth:`Surrogate.safe_step` keep every iterate PSD without
projecting onto the cone.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import QuadraticProblem

log = logging.getLogger(__name__)

EPS_FLOOR = 1e-4
EPS_WARN = 1e-3
PSD_TOL = 1e-8


class InfeasibleStartError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class UpperTriState:
    n: int
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=float).reshape(-1)
        if x.shape[0] != self.n * (self.n - 1) // 2:
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} entries for n={self.n}, got {x.shape[0]}")
        object.__setattr__(self, "x", x)

    def matrix(self) -> np.ndarray:
        return vec_to_matrix(self)


def tri_index(n: int, i: int, j: int) -> int:
    """Position of entry (i, j), i < j, in the row-major strict upper triangle (0-based)."""
    if not 0 <= i < j < n:
        raise IndexError("need 0 <= i < j < n")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def vec_to_matrix(s: UpperTriState) -> np.ndarray:
    X = np.eye(s.n)
    iu = np.triu_indices(s.n, 1)
    X[iu] = s.x
    X.T[iu] = s.x
    return X


def matrix_to_vec(X: np.ndarray) -> UpperTriState:
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    return UpperTriState(n, X[np.triu_indices(n, 1)])


def vector_gradient(G: np.ndarray) -> np.ndarray:
    """Chain rule for the vectorization: each x_d appears at (i,j) and (j,i)."""
    n = G.shape[0]
    iu = np.triu_indices(n, 1)
    return G[iu] + G.T[iu]


def _eigh(X):
    lam, U = np.linalg.eigh((X + X.T) / 2)
    return lam, U


def _spectral(U, d):
    return (U * d) @ U.T


def phi_singular(X: np.ndarray, eps: float, q: float) -> float:
    """(1 + eps^q) * sum_i s_i^2 / (s_i^2 + eps) over the singular values of symmetric X."""
    lam = np.linalg.eigvalsh((X + X.T) / 2)
    s2 = lam ** 2
    return float((1 + eps ** q) * np.sum(s2 / (s2 + eps)))


def phi_singular_grad(X: np.ndarray, eps: float, q: float) -> np.ndarray:
    """2 eps (1 + eps^q) (X X^T + eps I)^{-2} X for symmetric X."""
    lam, U = _eigh(X)
    d = 2 * eps * (1 + eps ** q) * lam / (lam ** 2 + eps) ** 2
    return _spectral(U, d)


def schatten_smoothed(X: np.ndarray, eps: float, p: float) -> float:
    lam = np.linalg.eigvalsh((X + X.T) / 2)
    return float(np.sum((lam ** 2 + eps) ** (p / 2)))


def schatten_grad(X: np.ndarray, eps: float, p: float) -> np.ndarray:
    """p X (X^T X + eps I)^{(p-2)/2} for symmetric X."""
    lam, U = _eigh(X)
    base = lam ** 2 + eps
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.where(base > 0, p * lam * base ** ((p - 2) / 2), 0.0)
    return _spectral(U, d)


def _check_eps(eps):
    if eps < EPS_FLOOR:
        raise ValueError(f"eps={eps} is below the supported floor {EPS_FLOOR}")
    if eps < EPS_WARN:
        warnings.warn(f"eps={eps} < {EPS_WARN}: gradients become ill-conditioned", RuntimeWarning)


@dataclass(frozen=True)
class SingularValue:
    eps: float = 0.005
    q: float = 0.8

    def __post_init__(self):
        if self.eps <= 0 or not 0 <= self.q <= 1:
            raise ValueError("need eps > 0 and q in [0, 1]")

    def value(self, X):
        return phi_singular(X, self.eps, self.q)

    def grad(self, X):
        return phi_singular_grad(X, self.eps, self.q)

    def safe_step(self) -> float:
        return self.eps / (4 * (1 + self.eps ** self.q))


@dataclass(frozen=True)
class Schatten:
    eps: float = 0.005
    p: float = 0.1
    cap_at_eps: bool = False

    def __post_init__(self):
        if self.eps <= 0 or not 0 < self.p <= 1:
            raise ValueError("need eps > 0 and p in (0, 1]")

    def value(self, X):
        return schatten_smoothed(X, self.eps, self.p)

    def grad(self, X):
        return schatten_grad(X, self.eps, self.p)

    def certified_step(self) -> float:
        e, p = self.eps, self.p
        return min(e ** ((2 - p) / 2), e ** ((2 - p) / p)) / (2 * p)

    def safe_step(self) -> float:
        # cap_at_eps selects the larger empirical step; PSD is then checked per step
        return self.eps if self.cap_at_eps else self.certified_step()


Surrogate = Union[SingularValue, Schatten]


def safe_step(surrogate: Surrogate) -> float:
    return surrogate.safe_step()


def numerical_rank(X: np.ndarray, tol: float = 1e-4) -> int:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return int(np.sum(np.linalg.svd(np.asarray(X, dtype=float), compute_uv=False) > tol))


@dataclass(frozen=True)
class RankMinOptions:
    surrogate: Surrogate = field(default_factory=SingularValue)
    lower: float = -math.inf
    upper: float = math.inf
    max_iter: int = 100
    grad_tol: float = 1e-5
    rank_tol: float = 1e-4
    step: float | None = None
    box_tol: float = 1e-9

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower box bound exceeds upper bound")
        _check_eps(self.surrogate.eps)


@dataclass
class RankMinResult:
    X: np.ndarray
    state: UpperTriState
    values: list[float]
    ranks: list[int]
    objectives: list[float]
    iterations: int
    stop: str


def _min_eig(X):
    return float(np.linalg.eigvalsh((X + X.T) / 2)[0])


def _in_box(val, opts):
    return opts.lower - opts.box_tol <= val <= opts.upper + opts.box_tol


def rank_descent(p: QuadraticProblem, X0: np.ndarray, opts: RankMinOptions = RankMinOptions()) -> RankMinResult:
    """Gradient descent on a rank surrogate in the upper-triangular parametrization.

    Stops when the next iterate would leave ``lower <= tr(AX) <= upper``
    (the last in-box iterate is returned), when the vectorized gradient norm
    falls below ``grad_tol``, or after ``max_iter`` steps.  Steps that would
    increase the surrogate or break PSD are halved before acceptance.
    """
    X = np.array(X0, dtype=float)
    if not np.array_equal(X, X.T):
        if np.max(np.abs(X - X.T)) > 1e-12:
            raise InfeasibleStartError("X0 is not symmetric")
        X = (X + X.T) / 2
    if np.max(np.abs(np.diag(X) - 1)) > 1e-9:
        raise InfeasibleStartError("X0 does not have unit diagonal")
    np.fill_diagonal(X, 1.0)
    if _min_eig(X) < -PSD_TOL:
        raise InfeasibleStartError("X0 is not PSD")
    obj = p.trace_with(X)
    if not _in_box(obj, opts):
        raise InfeasibleStartError(f"tr(A X0)={obj:.6g} outside [{opts.lower:.6g}, {opts.upper:.6g}]")

    sur = opts.surrogate
    alpha0 = opts.step if opts.step is not None else sur.safe_step()
    values = [sur.value(X)]
    ranks = [numerical_rank(X, opts.rank_tol)]
    objectives = [obj]
    stop = "max_iter"
    it = 0
    for it in range(1, opts.max_iter + 1):
        G = sur.grad(X)
        gnorm = float(np.linalg.norm(vector_gradient(G)))
        if gnorm < opts.grad_tol:
            stop = "grad_tol"
            it -= 1
            break
        alpha = alpha0
        while True:
            Xn = X - 2 * alpha * G
            np.fill_diagonal(Xn, 1.0)
            vn = sur.value(Xn)
            if vn <= values[-1] and _min_eig(Xn) >= -PSD_TOL:
                break
            alpha /= 2
            if alpha < 1e-14 * alpha0:
                Xn = None
                break
        if Xn is None:
            stop = "stalled"
            it -= 1
            break
        objn = p.trace_with(Xn)
        if not _in_box(objn, opts):
            stop = "left_box"
            it -= 1
            break
        X = Xn
        values.append(vn)
        ranks.append(numerical_rank(X, opts.rank_tol))
        objectives.append(objn)
    return RankMinResult(X, matrix_to_vec(X), values, ranks, objectives, it, stop)


@dataclass
class RoundingComparison:
    before: float
    after: float
    rank_before: int
    rank_after: int
    sdp_value: float
    lower: float
    result: RankMinResult
    x_before: np.ndarray | None = None
    x_after: np.ndarray | None = None


def improve_rounding(p: QuadraticProblem, surrogate: Surrogate | None = None, *, trials: int = 1000,
                     seed: int = 0, max_iter: int = 100, X0: np.ndarray | None = None,
                     bm_restarts: int = 3) -> RoundingComparison:
    """Low-rank SDP start, hyperplane rounding, rank descent, re-rounding.

    Both roundings use the same hyperplane stream so their difference reflects
    only the change in X.
    """
    from .lowrank import SolveOptions, bm_solve, gw_round_matrix, width_for

    surrogate = surrogate or SingularValue()
    if X0 is None:
        bm = bm_solve(p, width_for(p.n), SolveOptions(seed=seed, restarts=bm_restarts))
        X0 = bm.factor.gram()
        np.fill_diagonal(X0, 1.0)
    sdp_val = p.trace_with(X0)
    x0, w_star = gw_round_matrix(p, X0, trials, np.random.default_rng(seed))
    # a tight relaxation can round to its own value up to float error
    lo, hi = min(w_star, sdp_val), max(w_star, sdp_val)
    res = rank_descent(p, X0, RankMinOptions(surrogate, lower=lo, upper=hi, max_iter=max_iter))
    x1, after = gw_round_matrix(p, res.X, trials, np.random.default_rng(seed))
    return RoundingComparison(w_star, after, res.ranks[0], res.ranks[-1], sdp_val, w_star, res, x0, x1)
