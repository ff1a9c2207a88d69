"""Command-line entry point: ``binquad {maxcut,epsdp,ising} ...``.

Exit codes: 0 success, 2 usage error or unreadable input, 1 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import io as bio
from .core import qubo_to_quadratic
from .epsdp import EntropySpec, EpsdpSchedule, epsdp_solve
from .ising import (MspConfig, is_k_safe, map_attractive, msp_experiment,
                    patterns_up_to, removed_set)
from .lowrank import SolveOptions, bm_solve, gw_round, width_for
from .prevent import ProjectionOptions, project_to_safe, synthetic_city
from .rankmin import Schatten, SingularValue, improve_rounding, numerical_rank

log = logging.getLogger(__name__)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- loading

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def load_instances(path: str):
    """Yield ``(name, problem, constant, evaluate)`` for a Gset or Beasley file.

    ``evaluate(x)`` maps a +-1 state of ``problem`` to the reported objective.
    """
    text = _read(path)
    first = next((ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")), [])
    stem = Path(path).stem
    try:
        if len(first) == 2:
            g = bio.parse_gset(text)
            mc = bio.graph_to_maxcut_quadratic(g)
            yield stem, mc.problem, mc.constant, mc.cut
            return
        for q in bio.parse_beasley(text):
            hq = qubo_to_quadratic(q)
            yield (f"{stem}:{q.name}", hq.problem, hq.constant,
                   lambda x, hq=hq, q=q: q.value(hq.decode(x)))
    except bio.FormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def load_model(args):
    if getattr(args, "synthetic_city", False):
        m = synthetic_city(seed=args.seed)
    else:
        if not args.model:
            raise UsageError("a model JSON path or --synthetic-city is required")
        try:
            m = bio.model_from_json(_read(args.model), attractive=False)
        except bio.FormatError as exc:
            raise UsageError(str(exc)) from None
    if args.flip_h:
        m = m.with_params(h=-m.h)
    if not m.is_attractive():
        raise UsageError("model has negative couplings; only attractive models are supported")
    return m


# ---------------------------------------------------------------- output

def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _records_text(records, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([
            {"instance": r.instance, "method": r.method, "objective": r.objective, "rank": r.rank,
             "seconds": r.seconds, "seed": r.seed, "params": r.params} for r in records
        ], indent=2, sort_keys=True) + "\n"
    return bio.write_results(records)


def _table_text(header, rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2, sort_keys=True) + "\n"
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


class _Clock:
    def __init__(self, enabled: bool):
        self.enabled = enabled

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0 if self.enabled else 0.0


# ---------------------------------------------------------------- commands

def cmd_maxcut(args) -> int:
    if args.rankmin == "sv":
        sur = SingularValue(args.eps, args.q)
    elif args.rankmin == "schatten":
        sur = Schatten(args.eps, args.p)
    else:
        sur = None
    records = []
    for name, prob, _, evaluate in load_instances(args.instance):
        k = args.k or width_for(prob.n)
        with _Clock(not args.no_timing) as clk:
            bm = bm_solve(prob, k, SolveOptions(seed=args.seed))
            x, _ = gw_round(prob, bm.factor, args.trials, np.random.default_rng(args.seed))
        X0 = bm.factor.gram()
        rank0 = numerical_rank(X0, 1e-4)
        params = {"k": k, "trials": args.trials}
        records.append(bio.ResultRecord(name, "bm+gw", evaluate(x), rank0, clk.seconds, args.seed, params))
        if sur is not None:
            with _Clock(not args.no_timing) as clk:
                cmp = improve_rounding(prob, sur, trials=args.trials, seed=args.seed, X0=X0)
            p2 = dict(params, eps=args.eps, surrogate=args.rankmin)
            p2.update({"q": args.q} if args.rankmin == "sv" else {"p": args.p})
            records.append(bio.ResultRecord(name, f"rankmin-{args.rankmin}", evaluate(cmp.x_after),
                                            cmp.rank_after, clk.seconds, args.seed, p2))
    _emit(args, _records_text(records, args.format))
    return 0


def cmd_epsdp(args) -> int:
    try:
        spec = EntropySpec(args.family, args.alpha)
        sched = EpsdpSchedule(args.lambda0, args.gamma)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.k < 1:
        raise UsageError("--k must be >= 1")
    records, trace_rows = [], []
    for name, prob, _, evaluate in load_instances(args.instance):
        with _Clock(not args.no_timing) as clk:
            if args.k == 1:
                # a width-one factor with unit rows is already a sign vector
                x = np.where(np.random.default_rng(args.seed).random(prob.n) < 0.5, -1, 1).astype(np.int8)
                sigma2, lambdas, rank = [0.0], [0.0], 1
            else:
                res = epsdp_solve(prob, args.k, spec, sched, seed=args.seed)
                x, sigma2, lambdas = res.state, res.sigma2, res.lambdas
                rank = int(np.sum(res.factor.singular_values() > sched.outer_tol))
        params = {"k": args.k, "family": spec.family, "alpha": args.alpha, "gamma": args.gamma,
                  "lambda0": "grid" if args.lambda0 is None else args.lambda0}
        records.append(bio.ResultRecord(name, "epsdp", evaluate(x), rank, clk.seconds, args.seed, params))
        trace_rows += [(name, i, lam, s2) for i, (lam, s2) in enumerate(zip(lambdas, sigma2))]
    _emit(args, _records_text(records, args.format))
    if args.trace:
        Path(args.trace).write_text(_table_text(("instance", "outer", "lambda", "sigma2"), trace_rows, "csv"))
    return 0


def _parse_nodes(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad node list {text!r}") from None


def _parse_ks(text: str) -> list[int]:
    try:
        if "-" in text:
            lo, hi = text.split("-", 1)
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"bad --k value {text!r}") from None
    if not ks or min(ks) < 1:
        raise UsageError("--k values must be >= 1")
    return ks


def cmd_ising(args) -> int:
    if args.action == "msp":
        edges = tuple(_parse_nodes(args.edges)) if args.edges else MspConfig.edge_counts
        degrees = tuple(_parse_nodes(args.degrees)) if args.degrees else None
        try:
            cfg = MspConfig(n=args.n, edge_counts=edges, degrees=degrees, samples=args.samples,
                            seed=args.seed, workers=args.workers)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows = [(r.param, r.samples, r.mixed_count, r.proportion, r.seed) for r in msp_experiment(cfg)]
        _emit(args, _table_text(("param", "samples", "mixed_count", "proportion", "seed"), rows, args.format))
        return 0

    m = load_model(args)
    if args.action == "map":
        clamp = _parse_nodes(args.clamp) if args.clamp else None
        try:
            x = map_attractive(m, clamp)
        except (IndexError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        rows = [(" ".join(f"{int(v):+d}" for v in x), len(removed_set(x)))]
        _emit(args, _table_text(("state", "removed"), rows, args.format))
        return 0

    ks = _parse_ks(args.k)
    if args.action == "safety":
        rows = []
        for k in ks:
            safe, sizes = is_k_safe(m, patterns_up_to(m.n, k), k)
            rows.append((k, "safe" if safe else "unsafe", max(sizes, default=0)))
        _emit(args, _table_text(("k", "status", "max_removed"), rows, args.format))
        return 0

    # mitigate
    opts = ProjectionOptions(fix_h=args.fix_h, J_upper="J0" if args.reduce_only else None)
    rows, reports = [], []
    for k in ks:
        res = project_to_safe(m, patterns_up_to(m.n, k), opts)
        rt = res.runtime_s if not args.no_timing else 0.0
        rows.append((k, res.constraints, f"{rt:.6f}", f"{res.cost:.6f}", res.verified))
        rep = res.report()
        rep["runtime_s"] = rt
        reports.append(dict(rep, k=k))
    _emit(args, _table_text(("k", "constraints", "runtime_s", "cost", "verified"), rows, args.format))
    if args.report:
        Path(args.report).write_text(json.dumps(reports, indent=2, sort_keys=True) + "\n")
    return 0


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--no-timing", action="store_true", help="report 0 seconds for byte-stable output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binquad", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("maxcut", help="low-rank SDP + hyperplane rounding (+ rank descent)")
    p.add_argument("instance", help="Gset or Beasley file")
    p.add_argument("--k", type=int, default=None, help="factor width (default: Barvinok-Pataki)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--rankmin", choices=("sv", "schatten", "none"), default="none")
    p.add_argument("--eps", type=float, default=0.005)
    p.add_argument("--q", type=float, default=0.8)
    p.add_argument("--p", type=float, default=0.1)
    _common(p)
    p.set_defaults(func=cmd_maxcut)

    p = sub.add_parser("epsdp", help="entropy-penalized low-rank SDP")
    p.add_argument("instance")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--family", default="tsallis", help="tsallis, renyi or vonneumann")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--lambda0", type=float, default=None, help="default: grid search")
    p.add_argument("--gamma", type=float, default=1.5)
    p.add_argument("--trace", help="write the per-outer-step sigma_2 trace CSV here")
    _common(p)
    p.set_defaults(func=cmd_epsdp)

    p = sub.add_parser("ising", help="MAP, safety, mitigation and MSP experiments")
    p.add_argument("action", choices=("map", "safety", "mitigate", "msp"))
    p.add_argument("model", nargs="?", help="model JSON {n, edges, h}")
    p.add_argument("--synthetic-city", action="store_true", help="use the built-in 20-node hub model")
    p.add_argument("--clamp", help="comma-separated infected nodes (map)")
    p.add_argument("--k", default="1", help="k, list 1,2 or range 1-4")
    p.add_argument("--fix-h", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--reduce-only", action="store_true", help="corrected J may not exceed J0")
    p.add_argument("--flip-h", action="store_true", help="negate h after loading")
    p.add_argument("--report", help="write projection report JSON here (mitigate)")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--edges", help="comma-separated edge counts (msp)")
    p.add_argument("--degrees", help="comma-separated regular degrees (msp)")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--workers", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_ising)
    return parser


def _apply_config(parser, args, argv):
    """Fill options from a key=value file unless given on the command line."""
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    for lineno, raw in enumerate(_read(args.config).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{args.config}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.replace("-", "_")
        act = actions.get(dest)
        if act is None or dest == "config":
            raise UsageError(f"{args.config}:{lineno}: unknown key {key!r}")
        if any(tok == o or tok.startswith(o + "=") for o in act.option_strings for tok in argv):
            continue
        if act.nargs == 0:
            val = value.lower() in ("1", "true", "yes", "on")
        else:
            try:
                val = act.type(value) if act.type else value
            except ValueError:
                raise UsageError(f"{args.config}:{lineno}: bad value for {key}") from None
            if act.choices and val not in act.choices:
                raise UsageError(f"{args.config}:{lineno}: {key} must be one of {act.choices}")
        setattr(args, dest, val)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            _apply_config(parser, args, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"binquad: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver failures surface as exit code 1
        log.debug("failure", exc_info=True)
        print(f"binquad: failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
