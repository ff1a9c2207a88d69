#!/usr/bin/env python3
"""Mixed-state proportion vs edge count (or regular degree) for random attractive models."""

import argparse
import csv
import sys

from binquad.ising import MspConfig, msp_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--edges", default="30,50,70,90,110,130,150,170,190")
    ap.add_argument("--degrees", default=None, help="comma-separated; overrides --edges")
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    ints = lambda s: tuple(int(t) for t in s.split(","))
    cfg = MspConfig(n=args.n, edge_counts=ints(args.edges),
                    degrees=ints(args.degrees) if args.degrees else None,
                    samples=args.samples, seed=args.seed, workers=args.workers)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["degree" if args.degrees else "edges", "samples", "mixed", "proportion"])
    for row in msp_experiment(cfg):
        w.writerow([row.param, row.samples, row.mixed_count, f"{row.proportion:.6f}"])


if __name__ == "__main__":
    main()
