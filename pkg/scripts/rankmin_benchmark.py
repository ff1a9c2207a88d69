#!/usr/bin/env python3
"""Hyperplane rounding before and after rank descent on random max-cut graphs."""

import argparse

import numpy as np

from binquad.core import WeightedGraph
from binquad.io import graph_to_maxcut_quadratic
from binquad.rankmin import Schatten, SingularValue, improve_rounding


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--graphs", type=int, default=20)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=float, default=0.1)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--surrogate", choices=["sv", "schatten"], default="schatten")
    ap.add_argument("--eps", type=float, default=0.005)
    ap.add_argument("--iters", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    if args.surrogate == "sv":
        sur = SingularValue(eps=args.eps)
    else:
        sur = Schatten(eps=args.eps, cap_at_eps=True)
    rng = np.random.default_rng(args.seed)
    print("graph,sdp,cut_before,cut_after,rank_before,rank_after,stop")
    better = same = 0
    for i in range(args.graphs):
        iu = np.triu_indices(args.n, 1)
        keep = rng.random(iu[0].size) < args.p
        g = WeightedGraph(args.n, tuple((int(a), int(b), 1.0) for a, b in zip(iu[0][keep], iu[1][keep])))
        mc = graph_to_maxcut_quadratic(g)
        r = improve_rounding(mc.problem, sur, trials=args.trials, seed=i, max_iter=args.iters)
        b, a = mc.cut(r.x_before), mc.cut(r.x_after)
        better += a > b
        same += a == b
        print(f"{i},{r.sdp_value + mc.constant:.2f},{b:.0f},{a:.0f},{r.rank_before},{r.rank_after},{r.result.stop}")
    print(f"# improved {better}, unchanged {same}, worse {args.graphs - better - same}")


if __name__ == "__main__":
    main()
