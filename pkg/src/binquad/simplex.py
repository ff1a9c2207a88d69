"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Meant for small LPs (a few hundred variables and rows).  Problems are given
in the usual inequality form and converted to ``A z = b, z >= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


@dataclass(eq=False)
class LinearProgram:
    """``min c.z  s.t.  A_ub z <= b_ub,  A_eq z = b_eq,  lower <= z <= upper``."""

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).reshape(-1)
        n = self.c.shape[0]
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        self.lower = np.zeros(n) if self.lower is None else np.broadcast_to(
            np.asarray(self.lower, dtype=float), (n,)).copy()
        self.upper = np.full(n, np.inf) if self.upper is None else np.broadcast_to(
            np.asarray(self.upper, dtype=float), (n,)).copy()
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        for arr in (self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")

    @property
    def n(self) -> int:
        return self.c.shape[0]


def _rows(A, b, n, tag):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise ValueError(f"A_{tag} and b_{tag} disagree in length")
    return A, b


@dataclass
class Optimal:
    z: np.ndarray
    cost: float
    iterations: int = 0
    status: str = "optimal"


@dataclass
class Infeasible:
    status: str = "infeasible"


@dataclass
class Unbounded:
    status: str = "unbounded"


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T, basis, allowed, tol, max_iter):
    """Bland-rule iterations on tableau T (objective in the last row)."""
    m = T.shape[0] - 1
    for it in range(max_iter):
        red = T[-1, :-1]
        cand = np.flatnonzero((red < -tol) & allowed)
        if cand.size == 0:
            return "optimal", it
        j = int(cand[0])
        col = T[:m, j]
        pos = np.flatnonzero(col > tol)
        if pos.size == 0:
            return "unbounded", it
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        r = int(ties[np.argmin(np.asarray(basis)[ties])])
        _pivot(T, r, j)
        basis[r] = j
    raise RuntimeError("simplex iteration cap reached")


def _standard_form(lp: LinearProgram):
    """Substitute bounded / free variables; return (A, b, c, slack columns, recover)."""
    n = lp.n
    cols = []  # per original variable: list of (std column, sign) and offset
    offset = np.zeros(n)
    extra_rows = []
    k = 0
    for i in range(n):
        lo, hi = lp.lower[i], lp.upper[i]
        if np.isfinite(lo):
            offset[i] = lo
            cols.append([(k, 1.0)])
            if np.isfinite(hi):
                extra_rows.append((k, hi - lo))
            k += 1
        elif np.isfinite(hi):
            offset[i] = hi
            cols.append([(k, -1.0)])
            k += 1
        else:
            cols.append([(k, 1.0), (k + 1, -1.0)])
            k += 2
    M = np.zeros((n, k))
    for i, parts in enumerate(cols):
        for col, sgn in parts:
            M[i, col] = sgn
    # z = offset + M w, w >= 0
    A_ub = lp.A_ub @ M
    b_ub = lp.b_ub - lp.A_ub @ offset
    if extra_rows:
        E = np.zeros((len(extra_rows), k))
        for r, (col, ub) in enumerate(extra_rows):
            E[r, col] = 1.0
        A_ub = np.vstack([A_ub, E])
        b_ub = np.concatenate([b_ub, [ub for _, ub in extra_rows]])
    A_eq = lp.A_eq @ M
    b_eq = lp.b_eq - lp.A_eq @ offset
    n_ub = A_ub.shape[0]
    A = np.block([[A_ub, np.eye(n_ub)], [A_eq, np.zeros((A_eq.shape[0], n_ub))]])
    b = np.concatenate([b_ub, b_eq])
    c = np.concatenate([lp.c @ M, np.zeros(n_ub)])
    slack_cols = np.full(A.shape[0], -1)
    slack_cols[:n_ub] = k + np.arange(n_ub)
    return A, b, c, slack_cols, lambda w: offset + M @ w[:k]


def simplex_solve(lp: LinearProgram, tol: float = TOL, max_iter: int = 50_000):
    """Solve ``lp``; returns :class:`Optimal`, :class:`Infeasible` or :class:`Unbounded`."""
    A, b, c, slack_cols, recover = _standard_form(lp)
    m, N = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    slack_cols[neg] = -1  # a flipped slack has coefficient -1, unusable as a start basis

    need_art = np.flatnonzero(slack_cols < 0)
    n_art = need_art.size
    T = np.zeros((m + 1, N + n_art + 1))
    T[:m, :N] = A
    T[need_art, N + np.arange(n_art)] = 1.0
    T[:m, -1] = b
    basis = slack_cols.copy()
    basis[need_art] = N + np.arange(n_art)
    iters = 0

    if n_art:
        # phase 1: minimize the sum of artificials
        T[-1, :] = 0.0
        T[-1, N:N + n_art] = 1.0
        T[-1] -= T[need_art].sum(axis=0)
        allowed = np.ones(N + n_art, dtype=bool)
        status, it = _run(T, basis, allowed, tol, max_iter)
        iters += it
        scale = max(1.0, float(np.abs(b).max(initial=0.0)))
        if -T[-1, -1] > 1e-7 * scale:
            return Infeasible()
        # drive remaining artificials out of the basis; drop redundant rows
        keep = np.ones(m + 1, dtype=bool)
        for r in range(m):
            if basis[r] >= N:
                nz = np.flatnonzero(np.abs(T[r, :N]) > tol)
                if nz.size:
                    _pivot(T, r, int(nz[0]))
                    basis[r] = int(nz[0])
                else:
                    keep[r] = False
        T = np.delete(T[keep], np.s_[N:N + n_art], axis=1)
        basis = basis[keep[:m]]
        m = T.shape[0] - 1

    # phase 2
    T[-1, :] = 0.0
    T[-1, :N] = c
    for r, j in enumerate(basis):
        if c[j] != 0:
            T[-1] -= c[j] * T[r]
    status, it = _run(T, basis, np.ones(N, dtype=bool), tol, max_iter)
    iters += it
    if status == "unbounded":
        return Unbounded()
    w = np.zeros(N)
    w[basis] = T[:m, -1]
    z = recover(w)
    return Optimal(z, float(lp.c @ z), iters)
