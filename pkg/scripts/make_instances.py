#!/usr/bin/env python3
"""Write synthetic stand-ins for the benchmark files (Gset-class graph, gka-class QUBO)."""

import argparse
import itertools
from pathlib import Path

import numpy as np

from binquad.core import QuboProblem, WeightedGraph
from binquad.io import format_beasley, format_gset


def gset_like(n, density, rng):
    # unit weights, uniform edge sampling like the rudy generator
    pairs = [(a, b) for a, b in itertools.combinations(range(n), 2) if rng.random() < density]
    return WeightedGraph(n, tuple((a, b, 1.0) for a, b in pairs))


def gka_like(n, density, rng, lo=-100, hi=100):
    Q = np.triu(rng.integers(lo, hi + 1, size=(n, n)) * (rng.random((n, n)) < density), 1).astype(float)
    b = (rng.integers(lo, hi + 1, size=n) * (rng.random(n) < density)).astype(float)
    return QuboProblem(Q + Q.T, b, name=f"gka-like-{n}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/synthetic")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    (out / "gset_like_800.txt").write_text(format_gset(gset_like(800, 0.06, rng)))
    (out / "gka_like_50.txt").write_text(format_beasley([gka_like(50, 1.0, rng)]))
    (out / "gka_like_500.txt").write_text(format_beasley([gka_like(500, 0.1, rng)]))
    print("wrote", *sorted(p.name for p in out.iterdir()))


if __name__ == "__main__":
    main()
