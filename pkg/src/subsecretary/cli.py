"""Command-line interface: ``subsecretary <command> [options]``.

Commands: ``gen``, ``run``, ``estimate``, ``bounds``, ``check`` and ``replay``.
Exit status is 0 on success, 1 on bad input or usage, 2 when a check fails.
"""

import argparse
import csv
import io
import json
import math
import sys

from .bounds import (bound_greedy_k_secretary, bound_k_secretary, bound_matching, bound_packing,
                     greedy_limit)
from .errors import SubsecretaryError
from .harness import (AlgorithmConfig, check_matching_collision_rate, check_packing_feasible_rate,
                      estimate_ratio, run_once, build_solver)
from .instances import (GEN_FAMILIES, _clean, declare_parameters, dumps, gen_instance,
                        instance_to_dict, load_instance)
from .online import ArrivalOrder
from .oracles import EXHAUSTIVE_CHECK_MAX_N, check_monotone, check_submodular
from .reports import make_report, parse_report, replay, report_csv, report_json
from .rng import derive_seed

EXIT_OK, EXIT_INPUT, EXIT_CHECK = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def int_range(text):
    """``"3"``, ``"1..10"`` or ``"2,5,9"`` to a list of integers."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N, A..B or a comma list, got {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def _common(p):
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (default 0)")
    p.add_argument("--trials", type=int, default=argparse.SUPPRESS, help="Monte Carlo trials (default 1000)")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS, help="output format")
    p.add_argument("--out", default=argparse.SUPPRESS, help="write output here instead of stdout")


def _algo_args(p):
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--algorithm", choices=("k-secretary", "matching", "packing", "packing-known"),
                   help="defaults to the instance's variant")
    p.add_argument("--solver", help="offline solver (brute-force, greedy, top-k, continuous-greedy)")
    p.add_argument("--p", type=float, help="sample fraction override")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--mc-samples", type=int, default=1000)


def build_parser():
    parser = _Parser(prog="subsecretary",
                     description="Random-order online monotone submodular maximisation.",
                     epilog="exit status: 0 success, 1 bad input or usage, 2 a check failed")
    _common(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    _common(g)
    g.add_argument("--variant", choices=("cardinality", "matching", "packing"), required=True)
    g.add_argument("--family", choices=GEN_FAMILIES, help="value-oracle family")
    g.add_argument("--n", type=int, default=10, help="items, or L-vertices for matching")
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--n-right", type=int, default=3)
    g.add_argument("--edge-prob", type=float, default=1.0)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--B", type=float, default=2)
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--declare", action="store_true", help="store (B, d) for the known-parameter variant")

    r = sub.add_parser("run", help="one traced run")
    _common(r)
    _algo_args(r)
    r.add_argument("--order", help="comma-separated arrival order (default: random from --seed)")

    e = sub.add_parser("estimate", help="Monte Carlo ratio estimate with bounds")
    _common(e)
    _algo_args(e)
    e.add_argument("--exhaustive", action="store_true", help="average over all n! orders (n <= 8)")

    b = sub.add_parser("bounds", help="tabulate closed-form bounds")
    _common(b)
    b.add_argument("--variant", required=True,
                   choices=("k-secretary", "greedy", "matching", "packing", "packing-known"))
    b.add_argument("--k", type=int_range, default=[1])
    b.add_argument("--alpha", type=float, default=1.0)
    b.add_argument("--n", type=int, help="also report the finite-n adjusted value")
    b.add_argument("--B", type=float, nargs="+", default=[2.0])
    b.add_argument("--d", type=int_range, default=[1])

    c = sub.add_parser("check", help="oracle property checks and per-round rate audits")
    _common(c)
    c.add_argument("--instance", required=True)
    c.add_argument("--mode", choices=("exhaustive", "randomized"),
                   help=f"default: exhaustive when n <= {EXHAUSTIVE_CHECK_MAX_N}")
    c.add_argument("--audit", action="store_true",
                   help="also run the per-round feasibility audit (matching and packing)")
    c.add_argument("--steps", type=int, default=100)
    c.add_argument("--mc-samples", type=int, default=1000)

    p = sub.add_parser("replay", help="re-run a report and compare its statistics")
    _common(p)
    p.add_argument("--report", required=True)
    return parser


def _opt(args, name, default):
    return getattr(args, name, default)


def _emit(args, text):
    out = _opt(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in _clean(rows):
        w.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def _config(args, instance):
    algo = args.algorithm or {"cardinality": "k-secretary"}.get(instance.variant, instance.variant)
    solver = args.solver
    if solver is None:
        solver = {"k-secretary": "brute-force", "matching": "brute-force"}.get(algo, "continuous-greedy")
    return AlgorithmConfig(algo, solver, args.p, args.steps, args.mc_samples)


def cmd_gen(args):
    family = args.family or ("edge-valued" if args.variant == "matching" else "coverage")
    size = {"n": args.n, "k": args.k, "n_left": args.n, "n_right": args.n_right,
            "edge_prob": args.edge_prob, "m": args.m, "B": args.B, "d": args.d}
    if args.variant == "packing" and float(args.B).is_integer():
        size["B"] = int(args.B)
    inst = gen_instance(args.variant, family, _opt(args, "seed", 0), **size)
    if args.declare:
        if args.variant != "packing":
            raise SubsecretaryError("--declare only applies to packing instances")
        declare_parameters(inst)
    _emit(args, dumps(instance_to_dict(inst)))
    return EXIT_OK


def cmd_run(args):
    inst = load_instance(args.instance)
    config = _config(args, inst)
    seed = _opt(args, "seed", 0)
    if args.order:
        order = ArrivalOrder(int(t) for t in args.order.split(","))
    else:
        order = ArrivalOrder.random(inst.n, seed, 0, 0)
    rec = run_once(inst, config, build_solver(config, inst), order, derive_seed(seed, 0, 1))
    if _opt(args, "format", "json") == "csv":
        rows = [{k: v for k, v in e.to_dict().items() if k != "solution"} for e in rec.entries]
        _emit(args, _table_csv(rows))
    else:
        _emit(args, dumps(rec.to_dict()))
    return EXIT_OK


def cmd_estimate(args):
    inst = load_instance(args.instance)
    config = _config(args, inst)
    report = make_report(inst, config, _opt(args, "trials", 1000), _opt(args, "seed", 0), args.exhaustive)
    fmt = _opt(args, "format", "json")
    _emit(args, report_csv(report) if fmt == "csv" else report_json(report))
    return EXIT_OK


def cmd_bounds(args):
    rows = []
    if args.variant in ("k-secretary", "greedy"):
        for k in args.k:
            rep = (bound_k_secretary(k, args.alpha, args.n) if args.variant == "k-secretary"
                   else bound_greedy_k_secretary(k, args.n))
            rows.append({"k": k, "alpha": rep.params["alpha"], "bound": rep.value, "n_adjusted": rep.n_adjusted})
        if args.variant == "greedy":
            rows.append({"k": "inf", "alpha": 1 - 1 / math.e, "bound": greedy_limit(), "n_adjusted": None})
    elif args.variant == "matching":
        rep = bound_matching(args.alpha, args.n)
        rows.append({"alpha": args.alpha, "bound": rep.value, "n_adjusted": rep.n_adjusted})
    else:
        for B in args.B:
            for d in args.d:
                rep = bound_packing(args.alpha, B, d, args.variant == "packing-known")
                rows.append({"B": B, "d": d, "alpha": args.alpha, "bound": rep.value, "caveat": rep.caveat})
    if _opt(args, "format", "csv") == "json":
        _emit(args, dumps({"variant": args.variant, "rows": rows}))
    else:
        _emit(args, _table_csv(rows))
    return EXIT_OK


def cmd_check(args):
    inst = load_instance(args.instance)
    oracle = inst.oracle
    mode = args.mode or ("exhaustive" if oracle.n <= EXHAUSTIVE_CHECK_MAX_N else "randomized")
    seed = _opt(args, "seed", 0)
    trials = _opt(args, "trials", None)
    check_trials = trials or 10_000
    results = [check_submodular(oracle, mode, check_trials, seed).to_dict(),
               check_monotone(oracle, mode, check_trials, seed).to_dict()]
    if args.audit and inst.variant in ("matching", "packing"):
        algo = "matching" if inst.variant == "matching" else "packing"
        solver = "brute-force" if algo == "matching" else "continuous-greedy"
        config = AlgorithmConfig(algo, solver, None, args.steps, args.mc_samples)
        stats = estimate_ratio(inst, config, trials or 1000, seed)
        if algo == "matching":
            audit = check_matching_collision_rate(stats, inst.n)
        else:
            audit = check_packing_feasible_rate(stats, inst.n, inst.B, inst.d)
        results.append({"property": audit.name, "passed": audit.passed, "rows": audit.rows})
    ok = all(r["passed"] for r in results)
    if _opt(args, "format", "json") == "csv":
        _emit(args, _table_csv([{"property": r["property"], "passed": r["passed"]} for r in results]))
    else:
        _emit(args, dumps({"passed": ok, "checks": results}))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_replay(args):
    with open(args.report, encoding="utf-8") as fh:
        report = parse_report(fh.read(), args.report)
    same, fresh, diffs = replay(report)
    if _opt(args, "format", "json") == "csv":
        _emit(args, report_csv(fresh))
    else:
        _emit(args, dumps({"reproduced": same, "differing_fields": diffs}))
    return EXIT_OK if same else EXIT_CHECK


COMMANDS = {"gen": cmd_gen, "run": cmd_run, "estimate": cmd_estimate, "bounds": cmd_bounds,
            "check": cmd_check, "replay": cmd_replay}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError:
        return EXIT_INPUT
    except (SubsecretaryError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"subsecretary: error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
