"""Command-line front end.

Subcommands: run | sweep | audit | bounds | gen-dispatch-data.
Exit codes: 0 success, 1 usage error, 2 numeric/convergence failure.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .algorithms import (ALGORITHMS, AlgorithmConfig, apgd_offline,
                         apgd_s_offline, offline_optimum, ogd_init,
                         policy_i_init)
from .analysis import (audit_grid, bound_rhapd, bound_rhapd_quadratic,
                       bound_rhapd_s, compute_constants, regret)
from .errors import InvalidArgumentError, SocoError
from .experiments import (build_instance, generate_dispatch_profile, get_spec,
                          ingest_dispatch_csv, run_sweep, write_dispatch_csv,
                          write_metadata_json, write_results_csv,
                          write_timing_csv)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2


def parse_w_range(text):
    """Parse `a..b` (inclusive) or a comma list of W values."""
    values = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, _, hi = part.partition("..")
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise InvalidArgumentError(f"bad W range {part!r}") from None
            if lo > hi:
                raise InvalidArgumentError(f"empty W range {part!r}")
            values.extend(range(lo, hi + 1))
        else:
            try:
                values.append(int(part))
            except ValueError:
                raise InvalidArgumentError(f"bad W value {part!r}") from None
    if not values or any(w < 1 for w in values):
        raise InvalidArgumentError(f"W values must be >= 1: {text!r}")
    return values


def parse_seeds(text):
    try:
        seeds = [int(s) for s in text.split(",")]
    except ValueError:
        raise InvalidArgumentError(f"bad seed list {text!r}") from None
    return seeds


def _load_dispatch(args, spec):
    if getattr(args, "dispatch_csv", None):
        return ingest_dispatch_csv(args.dispatch_csv, expected_n=spec.N)
    return None


def _add_common(p, algos=True):
    p.add_argument("--exp", required=True, help="experiment id (E1..E7)")
    p.add_argument("--seed", required=True, help="comma-separated seed list")
    p.add_argument("--gamma", type=float, default=None,
                   help="switching-cost weight override (E4)")
    p.add_argument("--dispatch-csv", default=None,
                   help="hourly demand/supply CSV for E7 (default: bundled synthetic)")
    if algos:
        p.add_argument("--out", default=".", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="soco",
        description="Solvers and benchmarks for smoothed online convex optimization.")
    parser.add_argument("--version", action="version", version=f"soco {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one algorithm on one experiment instance")
    _add_common(p_run)
    p_run.add_argument("--algo", required=True, help="algorithm name")
    p_run.add_argument("--w", required=True, help="prediction window (single value)")

    p_sweep = sub.add_parser("sweep", help="sweep algorithms over W and seeds")
    _add_common(p_sweep)
    p_sweep.add_argument("--algos", default=None,
                         help="comma list of algorithms (default: experiment roster)")
    p_sweep.add_argument("--w", required=True, help="W range, e.g. 1..15 or 1,5,10")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="sweep parallelism (currently sequential; accepted for "
                              "interface stability)")

    p_audit = sub.add_parser("audit", help="audit a recorded iterate grid")
    _add_common(p_audit)
    p_audit.add_argument("--algo", required=True, choices=["rhapd", "rhapd_s"],
                         help="audited solver family")
    p_audit.add_argument("--w", required=True, help="prediction window (single value)")

    p_bounds = sub.add_parser("bounds", help="print theorem bounds per W")
    _add_common(p_bounds, algos=False)
    p_bounds.add_argument("--w", required=True, help="W range, e.g. 1..15")
    p_bounds.add_argument("--out", default=None, help="optional output directory")

    p_gen = sub.add_parser("gen-dispatch-data", help="write a synthetic dispatch profile")
    p_gen.add_argument("--seed", required=True, help="profile seed")
    p_gen.add_argument("--n", type=int, default=168, help="number of hours")
    p_gen.add_argument("--out", default=".", help="output directory")
    return parser


def _single_w(text):
    ws = parse_w_range(text)
    if len(ws) != 1:
        raise InvalidArgumentError(f"expected a single W value, got {text!r}")
    return ws[0]


def _ensure_out(path):
    os.makedirs(path, exist_ok=True)
    return path


def cmd_run(args):
    seeds = parse_seeds(args.seed)
    w = _single_w(args.w)
    spec = get_spec(args.exp, gamma=args.gamma)
    if args.algo not in ALGORITHMS:
        raise InvalidArgumentError(
            f"unknown algorithm {args.algo!r}; known: {sorted(ALGORITHMS)}")
    out = _ensure_out(args.out)
    sweep = run_sweep(spec, algorithms=(args.algo,), w_range=(w,), seeds=seeds,
                      dispatch=_load_dispatch(args, spec))
    write_results_csv(os.path.join(out, "results.csv"), sweep.rows)
    write_timing_csv(os.path.join(out, "timing.csv"), sweep.timings)
    write_metadata_json(os.path.join(out, "metadata.json"), sweep.metadata)
    for row in sweep.rows:
        print(f"{row['experiment']} {row['algorithm']} W={row['W']} "
              f"seed={row['seed']} regret={row['regret']:.6g}")
    return EXIT_OK


def cmd_sweep(args):
    seeds = parse_seeds(args.seed)
    ws = parse_w_range(args.w)
    spec = get_spec(args.exp, gamma=args.gamma)
    algos = tuple(a.strip() for a in args.algos.split(",")) if args.algos else None
    out = _ensure_out(args.out)
    sweep = run_sweep(spec, algorithms=algos, w_range=ws, seeds=seeds,
                      dispatch=_load_dispatch(args, spec),
                      progress=lambda row: print(
                          f"{row['experiment']} {row['algorithm']} W={row['W']} "
                          f"seed={row['seed']}", file=sys.stderr))
    write_results_csv(os.path.join(out, "results.csv"), sweep.rows)
    write_timing_csv(os.path.join(out, "timing.csv"), sweep.timings)
    write_metadata_json(os.path.join(out, "metadata.json"), sweep.metadata)
    print(f"wrote {len(sweep.rows)} rows to {os.path.join(out, 'results.csv')}")
    return EXIT_OK


def cmd_audit(args):
    seeds = parse_seeds(args.seed)
    w = _single_w(args.w)
    spec = get_spec(args.exp, gamma=args.gamma)
    out = _ensure_out(args.out)
    reports = {}
    for seed in seeds:
        inst = build_instance(spec, seed, W=w, dispatch=_load_dispatch(args, spec))
        cfg = AlgorithmConfig(init=spec.init, eta=spec.eta)
        if args.algo == "rhapd":
            layer0 = (policy_i_init(inst) if spec.init == "minimizer"
                      else ogd_init(inst, spec.eta))
            grid = apgd_offline(inst, layer0, w)
            family = "quadratic" if inst.switching.quadratic else "general"
            constants = compute_constants(inst, require=(family,))
        else:
            layer0 = ogd_init(inst, spec.eta)
            constants = compute_constants(inst, tau=1.0 / inst.l, require=("smooth",))
            grid = apgd_s_offline(inst, layer0, w, tau=constants.tau)
            family = "smooth"
        _, jstar = offline_optimum(inst)
        report = audit_grid(inst, grid, constants, family, jstar=jstar)
        reports[seed] = report
        path = os.path.join(out, f"audit_{spec.id}_{args.algo}_w{w}_seed{seed}.json")
        with open(path, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
        print(f"seed {seed}: family={family} layers={report.layers} "
              f"pass={report.passed}")
    if all(r.passed for r in reports.values()):
        return EXIT_OK
    return EXIT_NUMERIC


def cmd_bounds(args):
    seeds = parse_seeds(args.seed)
    ws = parse_w_range(args.w)
    spec = get_spec(args.exp, gamma=args.gamma)
    lines = []
    for seed in seeds:
        inst = build_instance(spec, seed, W=max(ws),
                              dispatch=_load_dispatch(args, spec))
        bounds = {}
        if inst.proximable:
            c = compute_constants(inst, require=("general",))
            bounds["theorem1"] = bound_rhapd(c, inst)
            if inst.switching.quadratic:
                bounds["theorem2"] = bound_rhapd_quadratic(c, inst)
        if inst.smooth and inst.switching.quadratic:
            cs = compute_constants(inst, tau=1.0 / inst.l, require=("smooth",))
            bounds["theorem3"] = bound_rhapd_s(cs, inst)
        header = "seed W " + " ".join(bounds)
        print(header)
        lines.append(header)
        for w in ws:
            line = f"{seed} {w} " + " ".join(format(fn(w), ".6e")
                                             for fn in bounds.values())
            print(line)
            lines.append(line)
    if args.out:
        out = _ensure_out(args.out)
        with open(os.path.join(out, f"bounds_{spec.id}.txt"), "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_gen_dispatch(args):
    seeds = parse_seeds(args.seed)
    out = _ensure_out(args.out)
    for seed in seeds:
        demand, supply = generate_dispatch_profile(seed, args.n)
        path = os.path.join(out, f"dispatch_seed{seed}.csv")
        write_dispatch_csv(path, demand, supply)
        print(f"wrote {path}")
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "audit": cmd_audit,
    "bounds": cmd_bounds,
    "gen-dispatch-data": cmd_gen_dispatch,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help, 2 for usage errors; remap the latter.
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except InvalidArgumentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SocoError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)},
                  sys.stderr, indent=2)
        print(file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
