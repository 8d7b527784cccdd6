"""Experiment reports: JSON with the full replay recipe, and a flat CSV view.

A report embeds the instance, the algorithm configuration, master seed,
trial count and package version next to the resulting statistics, so
:func:`replay` can recompute the statistics from the file alone.
"""

import csv
import io
import math

from . import __version__
from .bounds import bound_greedy_k_secretary, bound_k_secretary, bound_matching, bound_packing
from .errors import ValidationError
from .harness import AlgorithmConfig, TrialStats, build_solver, estimate_ratio
from .instances import _clean, dumps, instance_from_dict, instance_to_dict, loads

REPORT_FORMAT = "subsecretary-report"
REPORT_VERSION = 1


def bounds_for(instance, config):
    solver = build_solver(config, instance)
    alpha = solver.alpha
    n = instance.n
    if config.algorithm == "k-secretary":
        out = [bound_k_secretary(instance.k, alpha, n)] if instance.k >= 1 else []
        if config.solver == "greedy" and instance.k >= 1:
            out.append(bound_greedy_k_secretary(instance.k, n))
        return out
    if config.algorithm == "matching":
        return [bound_matching(alpha, n)]
    B, d = instance.B, instance.d
    if B >= 2 and d >= 1 and math.isfinite(B):
        return [bound_packing(alpha, B, d, config.algorithm == "packing-known")]
    return []


def make_report(instance, config, trials, seed, exhaustive=False, stats=None):
    if stats is None:
        stats = estimate_ratio(instance, config, trials, seed, exhaustive)
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "code_version": __version__,
        "config": config.to_dict(),
        "seed": int(seed),
        "trials": int(trials),
        "exhaustive": bool(exhaustive),
        "instance": instance_to_dict(instance),
        "stats": stats.to_dict(),
        "bounds": [b.to_dict() for b in bounds_for(instance, config)],
    }


def report_json(report):
    return dumps(report)


def report_csv(report):
    """Two-column ``field,value`` view with the same 12-digit numbers as the JSON."""
    rep = _clean(report)
    rows = [("seed", rep["seed"]), ("trials", rep["trials"]), ("exhaustive", rep["exhaustive"]),
            ("algorithm", rep["config"]["algorithm"]), ("solver", rep["config"]["solver"])]
    st = rep["stats"]
    for key in ("mean_ratio", "std_err", "mean_value", "opt_value", "benchmark_kind", "integral_opt"):
        rows.append((key, st[key]))
    rows += [("ci95_low", st["ci95"][0]), ("ci95_high", st["ci95"][1])]
    for b in rep["bounds"]:
        rows.append((f"bound.{b['kind']}", b["value"]))
        if b["n_adjusted"] is not None:
            rows.append((f"bound.{b['kind']}.n_adjusted", b["n_adjusted"]))
    for i in range(len(st["accepted"])):
        for key in ("tentative", "feasible", "accepted", "per_round_acceptance_rate",
                    "per_round_feasible_rate"):
            rows.append((f"round.{i + 1}.{key}", st[key][i]))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("field", "value"))
    for k, v in rows:
        w.writerow((k, "" if v is None else v))
    return buf.getvalue()


def parse_report(text, source="<report>"):
    rep = loads(text, source)
    if not isinstance(rep, dict) or rep.get("format") != REPORT_FORMAT:
        raise ValidationError(f"$.format: expected {REPORT_FORMAT!r}")
    for key in ("config", "seed", "trials", "exhaustive", "instance", "stats"):
        if key not in rep:
            raise ValidationError(f"$.{key}: required field missing")
    return rep


def replay(report):
    """Re-run a report's experiment; returns ``(matches, fresh_report, differing_fields)``."""
    instance = instance_from_dict(report["instance"])
    config = AlgorithmConfig.from_dict(report["config"])
    fresh = make_report(instance, config, report["trials"], report["seed"], report["exhaustive"])
    old, new = _clean(report["stats"]), _clean(fresh["stats"])
    diffs = sorted(k for k in set(old) | set(new) if old.get(k) != new.get(k))
    return not diffs, fresh, diffs


def stats_from_report(report):
    return TrialStats.from_dict(report["stats"])
