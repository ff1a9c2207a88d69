#!/usr/bin/env python3
"""Wall time of the entropy-penalized solver vs n on Erdos-Renyi graphs, with a linear fit."""

import argparse
import itertools
import time

import numpy as np

from binquad.core import WeightedGraph
from binquad.epsdp import epsdp_solve
from binquad.io import graph_to_maxcut_quadratic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="50,100,150,200,250,300,350,400,450,500")
    ap.add_argument("--p", type=float, default=0.2)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    ns = [int(s) for s in args.sizes.split(",")]
    ts = []
    print("n,seconds,cut,sigma2")
    for n in ns:
        edges = tuple((a, b, 1.0) for a, b in itertools.combinations(range(n), 2) if rng.random() < args.p)
        mc = graph_to_maxcut_quadratic(WeightedGraph(n, edges))
        best = np.inf
        for r in range(args.repeats):
            t0 = time.perf_counter()
            res = epsdp_solve(mc.problem, k=args.k, seed=r)
            best = min(best, time.perf_counter() - t0)
        ts.append(best)
        print(f"{n},{best:.3f},{mc.cut(res.state):.0f},{res.sigma2[-1]:.2e}")
    ts = np.array(ts)
    slope, icpt = np.polyfit(ns, ts, 1)
    fit = slope * np.array(ns) + icpt
    r2 = 1 - np.sum((ts - fit) ** 2) / np.sum((ts - ts.mean()) ** 2)
    print(f"# fit: t = {slope:.3e} n + {icpt:.3f}, R^2 = {r2:.4f}")


if __name__ == "__main__":
    main()
