"""Dinic max-flow on small dense-ish graphs with float capacities."""

from __future__ import annotations

from collections import deque

INF = 1e18


class FlowNetwork:
    """Directed graph with residual arcs stored pairwise (arc ``i ^ 1`` is the reverse)."""

    def __init__(self, n: int):
        self.n = n
        self.head: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[float] = []

    def add_edge(self, u: int, v: int, cap: float, rev_cap: float = 0.0) -> None:
        if cap < 0 or rev_cap < 0:
            raise ValueError("capacities must be non-negative")
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(float(cap))
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(float(rev_cap))

    def _levels(self, s, t, tol):
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if level[v] < 0 and self.cap[e] > tol:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _augment(self, s, t, level, it, tol):
        # iterative DFS along the level graph; returns pushed amount
        stack = [s]
        arcs: list[int] = []
        while stack:
            u = stack[-1]
            if u == t:
                push = min(self.cap[e] for e in arcs)
                for e in arcs:
                    self.cap[e] -= push
                    self.cap[e ^ 1] += push
                return push
            advanced = False
            while it[u] < len(self.head[u]):
                e = self.head[u][it[u]]
                v = self.to[e]
                if self.cap[e] > tol and level[v] == level[u] + 1:
                    stack.append(v)
                    arcs.append(e)
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                level[u] = -1  # dead end
                stack.pop()
                if arcs:
                    arcs.pop()
                    it[stack[-1]] += 1
        return 0.0

    def max_flow(self, s: int, t: int, tol: float = 1e-12) -> float:
        """Maximum s-t flow; arcs with residual ``<= tol`` count as saturated."""
        self._tol = tol
        total = 0.0
        while True:
            level = self._levels(s, t, tol)
            if level is None:
                return total
            it = [0] * self.n
            while True:
                pushed = self._augment(s, t, level, it, tol)
                if pushed <= 0:
                    break
                total += pushed

    def source_side(self, s: int) -> list[bool]:
        """Nodes reachable from ``s`` in the residual graph: the minimal min-cut source set."""
        tol = getattr(self, "_tol", 1e-12)
        seen = [False] * self.n
        seen[s] = True
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if not seen[v] and self.cap[e] > tol:
                    seen[v] = True
                    q.append(v)
        return seen
