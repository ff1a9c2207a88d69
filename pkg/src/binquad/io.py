"""Benchmark instance parsers and result serialization.

Files use 1-based node indices; everything in memory is 0-based.  Blank
lines and lines starting with ``#`` are ignored by both parsers.
"""

from __future__ import annotations

import csv
import io as _io
import json
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .core import IsingModel, QuadraticProblem, QuboProblem, WeightedGraph, as_spins

RESULT_COLUMNS = ("instance", "method", "objective", "rank", "seconds", "seed", "params")


class FormatError(ValueError):
    pass


def _data_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _number(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise FormatError(f"line {lineno}: bad number {tok!r}") from None


def _index(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {lineno}: bad index {tok!r}") from None


def parse_gset(text: str) -> WeightedGraph:
    """Parse a rudy/Gset graph: header ``n m`` then ``m`` lines ``a b w``."""
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise FormatError("empty graph file") from None
    if len(header) != 2:
        raise FormatError(f"line {lineno}: header must be 'n m'")
    n, m = _index(header[0], lineno), _index(header[1], lineno)
    edges = []
    seen = set()
    for lineno, toks in lines:
        if len(toks) != 3:
            raise FormatError(f"line {lineno}: expected 'a b w'")
        a, b = _index(toks[0], lineno), _index(toks[1], lineno)
        w = _number(toks[2], lineno)
        if not (1 <= a <= n and 1 <= b <= n):
            raise FormatError(f"line {lineno}: index out of range 1..{n}")
        if a == b:
            raise FormatError(f"line {lineno}: self-loop")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise FormatError(f"line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((a - 1, b - 1, w))
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    return WeightedGraph(n, tuple(edges))


def format_gset(g: WeightedGraph) -> str:
    out = [f"{g.n} {g.m}"]
    for a, b, w in g.edges:
        ws = str(int(w)) if float(w).is_integer() else repr(w)
        out.append(f"{a + 1} {b + 1} {ws}")
    return "\n".join(out) + "\n"


def parse_beasley(text: str) -> list[QuboProblem]:
    """Parse an ORLIB ``bqp`` file holding several instances.

    Off-diagonal triples ``i j q`` set ``Q_ij = Q_ji = q``; diagonal triples
    go to the linear term ``b_i`` (``y_i^2 = y_i`` on {0,1}).
    """
    lines = _data_lines(text)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError("empty bqp file") from None
    if len(head) != 1:
        raise FormatError(f"line {lineno}: first line must be the instance count")
    count = _index(head[0], lineno)
    problems = []
    for k in range(count):
        try:
            lineno, head = next(lines)
        except StopIteration:
            raise FormatError(f"truncated file: instance {k + 1} of {count} missing") from None
        if len(head) != 2:
            raise FormatError(f"line {lineno}: instance header must be 'n nnz'")
        n, nnz = _index(head[0], lineno), _index(head[1], lineno)
        Q = np.zeros((n, n))
        b = np.zeros(n)
        for _ in range(nnz):
            try:
                lineno, toks = next(lines)
            except StopIteration:
                raise FormatError(f"truncated file inside instance {k + 1}") from None
            if len(toks) != 3:
                raise FormatError(f"line {lineno}: expected 'i j q'")
            i, j = _index(toks[0], lineno), _index(toks[1], lineno)
            q = _number(toks[2], lineno)
            if not (1 <= i <= n and 1 <= j <= n):
                raise FormatError(f"line {lineno}: index out of range 1..{n}")
            if i == j:
                b[i - 1] += q
            else:
                Q[i - 1, j - 1] = q
                Q[j - 1, i - 1] = q
        problems.append(QuboProblem(Q, b, name=f"bqp{n}.{k + 1}"))
    rest = list(lines)
    if rest:
        raise FormatError(f"line {rest[0][0]}: trailing data after {count} instances")
    return problems


def format_beasley(problems: Iterable[QuboProblem]) -> str:
    """Inverse of :func:`parse_beasley` (upper-triangle pairs, linear terms on the diagonal)."""
    problems = list(problems)
    out = [str(len(problems))]
    for q in problems:
        iu, ju = np.nonzero(np.triu(q.Q, 1))
        di = np.flatnonzero(q.b)
        out.append(f"{q.n} {len(iu) + len(di)}")
        trip = sorted([(int(i), int(j), q.Q[i, j]) for i, j in zip(iu, ju)] + [(int(i), int(i), q.b[i]) for i in di])
        out += [f"{i + 1} {j + 1} {int(v) if float(v).is_integer() else repr(float(v))}" for i, j, v in trip]
    return "\n".join(out) + "\n"


@dataclass(frozen=True, eq=False)
class MaxCutProblem:
    """``cut(x) = x^T A x + constant`` for a weighted graph."""

    problem: QuadraticProblem
    constant: float
    graph: WeightedGraph

    def cut(self, x) -> float:
        return cut_value(self.graph, x)


def graph_to_maxcut_quadratic(g: WeightedGraph) -> MaxCutProblem:
    W = g.weight_matrix(sparse=True)
    total = sum(w for _, _, w in g.edges)
    return MaxCutProblem(QuadraticProblem(-W / 4, name="maxcut"), total / 2, g)


def cut_value(g: WeightedGraph, x) -> float:
    """Total weight of edges whose endpoints carry different spins."""
    x = as_spins(x)
    a, b, w = g.arrays()
    return float(np.sum(w[x[a] != x[b]]))


@dataclass
class ResultRecord:
    instance: str
    method: str
    objective: float
    rank: int
    seconds: float
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.objective):
            raise ValueError("objective must be finite")
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    def row(self) -> list[str]:
        params = ";".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return [self.instance, self.method, repr(float(self.objective)), str(int(self.rank)),
                f"{self.seconds:.6f}", str(int(self.seed)), params]


def write_results(records: Iterable[ResultRecord]) -> str:
    """CSV text with columns instance,method,objective,rank,seconds,seed,params.

    ``params`` is a ``;``-separated list of sorted ``key=value`` pairs.
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def read_results(text: str) -> list[ResultRecord]:
    reader = csv.DictReader(_io.StringIO(text))
    if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
        raise FormatError("unexpected result columns")
    out = []
    for row in reader:
        params = dict(kv.split("=", 1) for kv in row["params"].split(";") if kv)
        out.append(ResultRecord(row["instance"], row["method"], float(row["objective"]),
                                int(row["rank"]), float(row["seconds"]), int(row["seed"]), params))
    return out


def model_to_json(model: IsingModel) -> str:
    payload = {
        "n": model.n,
        "edges": [[a, b, w] for a, b, w in model.graph.edges],
        "h": [float(v) for v in model.h],
    }
    return json.dumps(payload)


def model_from_json(text: str, attractive: bool = False) -> IsingModel:
    try:
        data = json.loads(text)
        n = int(data["n"])
        edges = tuple((int(a), int(b), float(w)) for a, b, w in data["edges"])
        h = [float(v) for v in data["h"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad Ising model JSON: {exc}") from None
    return IsingModel(WeightedGraph(n, edges), h, attractive=attractive)
