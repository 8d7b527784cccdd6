"""Monte Carlo estimation of competitive ratios and audits of per-round probability bounds.

A trial draws an arrival order (and, for packing, a rounding seed) from
streams keyed by ``(master seed, trial)``, runs the configured algorithm and
divides the value obtained by an offline benchmark.  Because the benchmark is
order-independent, the mean of these ratios estimates ``E[v(ALG)] / v(OPT)``.
"""

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import BudgetError, InputError
from .bounds import collision_bound, packing_audit_rounds
from .offline import (BRUTE_FORCE_BUDGET, BruteForceMatchingSolver, BruteForceSolver,
                      GreedyMatchingSolver, GreedySolver, TopKSolver, brute_force_cardinality,
                      enumerate_matchings, top_k_modular)
from .online import (MATCHING_P, SECRETARY_P, ArrivalOrder, run_k_secretary, run_matching,
                     run_packing, run_packing_known)
from .oracles import ModularOracle, multilinear_value, subset_masks
from .packing import ContinuousGreedySolver, PackingPolytope, continuous_greedy
from .rng import derive_seed, stream

EXHAUSTIVE_MAX_N = 8
INTEGRAL_PACKING_MAX_N = 12
ALGORITHMS = {"cardinality": ("k-secretary",), "matching": ("matching",),
              "packing": ("packing", "packing-known")}
SOLVERS = {"k-secretary": ("brute-force", "greedy", "top-k"), "matching": ("brute-force", "greedy"),
           "packing": ("continuous-greedy",), "packing-known": ("continuous-greedy",)}


@dataclass(frozen=True)
class AlgorithmConfig:
    algorithm: str
    solver: str
    p: float = None
    steps: int = 100
    mc_samples: int = 1000
    exact: bool = None

    def __post_init__(self):
        if self.algorithm not in SOLVERS:
            raise InputError(f"unknown algorithm {self.algorithm!r}")
        if self.solver not in SOLVERS[self.algorithm]:
            raise InputError(f"solver {self.solver!r} is not available for {self.algorithm}; "
                             f"choose from {', '.join(SOLVERS[self.algorithm])}")

    @classmethod
    def default(cls, variant, solver=None, **kw):
        algo = ALGORITHMS[variant][0]
        return cls(algo, solver or SOLVERS[algo][0], **kw)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def build_solver(config, instance):
    algo, name = config.algorithm, config.solver
    if instance.variant not in ("cardinality", "matching", "packing") or algo not in ALGORITHMS[instance.variant]:
        raise InputError(f"algorithm {algo!r} does not apply to a {instance.variant} instance")
    if algo == "k-secretary":
        return {"brute-force": BruteForceSolver, "greedy": GreedySolver, "top-k": TopKSolver}[name](instance.k)
    if algo == "matching":
        return BruteForceMatchingSolver() if name == "brute-force" else GreedyMatchingSolver()
    return ContinuousGreedySolver(config.steps, config.mc_samples, config.exact)


def run_once(instance, config, solver, order, seed):
    if config.algorithm == "k-secretary":
        return run_k_secretary(instance.oracle, instance.k, solver, order,
                               SECRETARY_P if config.p is None else config.p)
    if config.algorithm == "matching":
        return run_matching(instance, solver, order, MATCHING_P if config.p is None else config.p)
    if config.algorithm == "packing":
        return run_packing(instance, solver, order, seed)
    return run_packing_known(instance, solver, order, seed)


# --------------------------------------------------------------------------
# benchmarks
# --------------------------------------------------------------------------

@dataclass
class Benchmark:
    value: float
    kind: str
    integral: float = None
    fractional: float = None

    def __iter__(self):
        return iter((self.value, self.kind))


def packing_integral_opt(instance):
    """Best feasible 0-1 vector by enumeration (``n <= 12``)."""
    n = instance.n
    if n > INTEGRAL_PACKING_MAX_N:
        raise BudgetError(f"integral packing optimum needs n <= {INTEGRAL_PACKING_MAX_N}")
    members = subset_masks(n)
    ok = np.all(members @ instance.A.T <= instance.b, axis=1)
    return float(np.max(instance.oracle.values_batch(members[ok])))


def packing_fractional_benchmark(instance, steps=100, mc_samples=1000, seed=0):
    """``F`` of continuous greedy on the unscaled polytope with every item available."""
    poly = PackingPolytope(instance.A, instance.b)
    x = continuous_greedy(instance.oracle, poly, steps, mc_samples, seed)
    return multilinear_value(instance.oracle, x, seed=seed)


def offline_opt_benchmark(instance, steps=100, mc_samples=1000, seed=0):
    """Offline benchmark for ratios; packing ratios use the fractional value."""
    if instance.variant == "cardinality":
        items = range(instance.n)
        if isinstance(instance.oracle, ModularOracle):
            sol = top_k_modular(instance.oracle, items, instance.k)
        else:
            sol = brute_force_cardinality(instance.oracle, items, instance.k, BRUTE_FORCE_BUDGET)
        v = instance.oracle.value(sol)
        return Benchmark(v, "integral", integral=v)
    if instance.variant == "matching":
        ms = enumerate_matchings(instance.graph, range(len(instance.graph.edges)))
        members = np.zeros((len(ms), instance.oracle.n), dtype=bool)
        for row, m in enumerate(ms):
            members[row, list(m)] = True
        v = float(np.max(instance.oracle.values_batch(members)))
        return Benchmark(v, "integral", integral=v)
    frac = packing_fractional_benchmark(instance, steps, mc_samples, derive_seed(seed, 0))
    integral = packing_integral_opt(instance) if instance.n <= INTEGRAL_PACKING_MAX_N else None
    return Benchmark(frac, "fractional", integral=integral, fractional=frac)


# --------------------------------------------------------------------------
# Monte Carlo estimation
# --------------------------------------------------------------------------

@dataclass
class TrialStats:
    trials: int
    mean_ratio: float
    std_err: float
    ci95: tuple
    mean_value: float
    opt_value: float
    benchmark_kind: str
    exhaustive: bool
    tentative: list = field(default_factory=list)
    feasible: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    integral_opt: float = None

    @property
    def rounds(self):
        return len(self.accepted)

    @property
    def per_round_acceptance_rate(self):
        return [a / self.trials for a in self.accepted]

    @property
    def per_round_feasible_rate(self):
        return [f / t if t else None for f, t in zip(self.feasible, self.tentative)]

    def to_dict(self):
        out = asdict(self)
        out["ci95"] = list(self.ci95)
        out["per_round_acceptance_rate"] = self.per_round_acceptance_rate
        out["per_round_feasible_rate"] = self.per_round_feasible_rate
        return out

    @classmethod
    def from_dict(cls, d):
        keys = {f for f in cls.__dataclass_fields__}
        kw = {k: v for k, v in d.items() if k in keys}
        kw["ci95"] = tuple(kw["ci95"])
        return cls(**kw)


def _orders(n, trials, seed, exhaustive):
    if exhaustive:
        if n > EXHAUSTIVE_MAX_N:
            raise BudgetError(f"exhaustive mode enumerates n! orders and needs n <= {EXHAUSTIVE_MAX_N}")
        return [ArrivalOrder(p) for p in itertools.permutations(range(n))]
    if trials < 1:
        raise InputError("trials must be >= 1")
    return [ArrivalOrder.random(n, seed, t, 0) for t in range(trials)]


def estimate_ratio(instance, config, trials=1000, seed=0, exhaustive=False, on_record=None,
                   benchmark=None):
    """Empirical competitive ratio of ``config`` on ``instance``.

    ``exhaustive`` averages over all ``n!`` arrival orders instead of
    sampling.  ``on_record`` is called with every :class:`RunRecord`.
    """
    if benchmark is None:
        benchmark = offline_opt_benchmark(instance, config.steps, config.mc_samples, seed)
    solver = build_solver(config, instance)
    n = instance.n
    orders = _orders(n, trials, seed, exhaustive)
    tentative, feasible, accepted = np.zeros(n, int), np.zeros(n, int), np.zeros(n, int)
    ratios, values = np.empty(len(orders)), np.empty(len(orders))
    for t, order in enumerate(orders):
        rec = run_once(instance, config, solver, order, derive_seed(seed, t, 1))
        for e in rec.entries:
            tentative[e.round - 1] += e.tentative
            feasible[e.round - 1] += bool(e.tentative and e.feasible)
            accepted[e.round - 1] += e.accepted
        values[t] = rec.value
        ratios[t] = rec.value / benchmark.value if benchmark.value > 0 else 1.0
        if on_record is not None:
            on_record(rec)
    count = len(orders)
    mean = float(ratios.mean())
    deterministic = config.algorithm in ("k-secretary", "matching")
    if count < 2 or (exhaustive and deterministic):
        se = 0.0
    else:
        se = float(ratios.std(ddof=1) / math.sqrt(count))
    return TrialStats(count, mean, se, (mean - 1.96 * se, mean + 1.96 * se), float(values.mean()),
                      benchmark.value, benchmark.kind, bool(exhaustive), tentative.tolist(),
                      feasible.tolist(), accepted.tolist(), benchmark.integral)


# --------------------------------------------------------------------------
# per-round rate audits
# --------------------------------------------------------------------------

@dataclass
class RateAudit:
    name: str
    rows: list
    passed: bool

    @property
    def violations(self):
        return [r for r in self.rows if r["violation"]]

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "rows": self.rows}


def _audit_row(ell, t, f, bound, se_at):
    rate = f / t if t else None
    se = math.sqrt(se_at * (1 - se_at) / t) if t else None
    violation = bool(t and rate + 3 * se < bound)
    return {"round": ell, "tentative": int(t), "feasible": int(f), "rate": rate, "bound": bound,
            "std_err": se, "violation": violation}


def check_matching_collision_rate(stats, n):
    """Per active round, the share of tentative edges that were feasible vs ``(ceil(n/2)-1)/(l-1)``.

    The binomial standard error is taken at the bound itself, so rounds where
    the bound is 1 tolerate no infeasible tentative edge.
    """
    rows = []
    for ell in range(math.ceil(n / 2), n + 1):
        if ell < 1:
            continue
        bound = collision_bound(ell, n)
        rows.append(_audit_row(ell, stats.tentative[ell - 1], stats.feasible[ell - 1], bound, bound))
    return RateAudit("matching-collision", rows, not any(r["violation"] for r in rows))


def check_packing_feasible_rate(stats, n, B, d):
    """Early-round feasibility of tentative selections vs 1/2 for ``l <= n/(4 e psi)``."""
    last = packing_audit_rounds(n, B, d)
    rows = [_audit_row(ell, stats.tentative[ell - 1], stats.feasible[ell - 1], 0.5, 0.5)
            for ell in range(1, min(last, n) + 1)]
    return RateAudit("packing-feasibility", rows, not any(r["violation"] for r in rows))
