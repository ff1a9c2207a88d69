#!/usr/bin/env python3
"""Projection cost into the two-mode safe polytope for k = 1..K on the synthetic city."""

import argparse

from binquad.ising import patterns_up_to
from binquad.prevent import ProjectionOptions, project_to_safe, synthetic_city


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--free-h", action="store_true")
    ap.add_argument("--reduce-only", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    city = synthetic_city(args.n, args.seed)
    opts = ProjectionOptions(fix_h=not args.free_h, J_upper="J0" if args.reduce_only else None)
    print("k,constraints,runtime_s,cost,active_rows,verified")
    for k in range(1, args.kmax + 1):
        res = project_to_safe(city, patterns_up_to(city.n, k), opts)
        print(f"{k},{res.constraints},{res.runtime_s:.3f},{res.cost:.4f},{len(res.active_rows)},{res.verified}")


if __name__ == "__main__":
    main()
