#!/usr/bin/env python3
"""Second singular value of the factor after each outer (lambda) step."""

import argparse
import sys

from binquad.cli import load_instances
from binquad.epsdp import EntropySpec, EpsdpSchedule, epsdp_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("instance", help="Gset or Beasley file")
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--lambda0", type=float, default=None)
    ap.add_argument("--family", default="tsallis")
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    spec = EntropySpec(args.family, args.alpha)
    sched = EpsdpSchedule(args.lambda0, args.gamma)
    print("instance,outer,lambda,sigma2,inner_iterations")
    for name, prob, const, evaluate in load_instances(args.instance):
        res = epsdp_solve(prob, args.k, spec, sched, seed=args.seed)
        for i, (lam, s2, it) in enumerate(zip(res.lambdas, res.sigma2, res.inner_iterations)):
            print(f"{name},{i},{lam:.6g},{s2:.6e},{it}")
        print(f"# {name}: objective {evaluate(res.state):.6g}, lambda0 {res.lambda0:g}", file=sys.stderr)


if __name__ == "__main__":
    main()
