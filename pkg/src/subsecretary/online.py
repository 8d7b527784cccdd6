"""The three random-order online algorithms, with a per-round trace.

Each run returns a :class:`RunRecord`.  Rounds are numbered from 1; round
``l`` sees the ``l``-th arriving item and the prefix of everything that
arrived so far.  All randomness in the packing runs comes from streams keyed
by ``(seed, round, purpose)``, so a round's coin flips do not depend on what
earlier rounds consumed and a record can be replayed from its seed and order.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import known_sample_fraction, sample_rounds
from .errors import InputError, SubsecretaryError
from .offline import MatchingSolverInput
from .packing import PackingPolytope
from .rng import derive_seed, stream

SECRETARY_P = 1 / math.e
MATCHING_P = 0.5

# stream purposes within a packing round
_ROUNDING, _SOLVER = 0, 1


class ArrivalOrder(tuple):
    """A permutation of ``range(n)``; entry ``t`` arrives in round ``t + 1``."""

    def __new__(cls, perm):
        perm = tuple(int(i) for i in perm)
        if sorted(perm) != list(range(len(perm))):
            raise InputError("arrival order must be a permutation of 0..n-1")
        return super().__new__(cls, perm)

    @classmethod
    def random(cls, n, seed, *keys):
        return cls(stream(seed, *keys).permutation(n))

    @property
    def n(self):
        return len(self)


@dataclass
class RoundEntry:
    round: int
    item: int
    solution: object = None
    tentative: bool = False
    feasible: bool = None
    accepted: bool = False

    def to_dict(self):
        sol = self.solution
        if isinstance(sol, np.ndarray):
            sol = sol.tolist()
        elif isinstance(sol, tuple):
            sol = list(sol)
        return {"round": self.round, "item": self.item, "solution": sol, "tentative": self.tentative,
                "feasible": self.feasible, "accepted": self.accepted}


@dataclass
class RunRecord:
    variant: str
    order: tuple
    entries: list = field(default_factory=list)
    solution: tuple = ()
    value: float = 0.0
    seed: int = None
    params: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def to_dict(self):
        return {"variant": self.variant, "order": list(self.order), "seed": self.seed,
                "params": dict(self.params), "warnings": list(self.warnings),
                "solution": list(self.solution), "value": self.value,
                "rounds": [e.to_dict() for e in self.entries]}


def _call(round_no, fn, *args):
    try:
        return fn(*args)
    except SubsecretaryError as exc:
        raise type(exc)(f"round {round_no}: {exc}") from exc


def _order(order, n):
    order = ArrivalOrder(order)
    if order.n != n:
        raise InputError(f"arrival order has length {order.n}, expected n={n}")
    return order


def run_k_secretary(oracle, k, solver, order, p=SECRETARY_P):
    """Random-order k-secretary with an offline solver re-run on every prefix.

    The first ``ceil(p n) - 1`` items are only observed.  Afterwards the
    arriving item is tentative when it belongs to the solver's solution on
    the prefix, and is accepted while fewer than ``k`` items are held.
    """
    if not 0 < p < 1:
        raise InputError(f"sample fraction p must lie in (0, 1), got {p}")
    if k < 1:
        raise InputError("k must be >= 1")
    n = oracle.n
    order = _order(order, n)
    skip = sample_rounds(p, n)
    rec = RunRecord("k-secretary", tuple(order), params={"k": k, "p": p, "solver": solver.kind})
    accepted = []
    for ell in range(1, n + 1):
        j = order[ell - 1]
        if ell <= skip:
            rec.entries.append(RoundEntry(ell, j))
            continue
        sol = tuple(_call(ell, solver, oracle, order[:ell]))
        tentative = j in sol
        feasible = len(accepted) < k if tentative else None
        if tentative and feasible:
            accepted.append(j)
        rec.entries.append(RoundEntry(ell, j, sol, tentative, feasible, bool(tentative and feasible)))
    rec.solution = tuple(sorted(accepted))
    rec.value = oracle.value(rec.solution)
    return rec


def run_matching(instance, solver, order, p=MATCHING_P):
    """Random-order bipartite matching; L-vertices arrive, R is known upfront.

    After ``ceil(p n) - 1`` observed vertices, the arriving vertex ``u`` takes
    its edge in the solver's matching of the revealed subgraph, if it has
    one, provided the edge's R-vertex is still free.
    """
    if not 0 < p < 1:
        raise InputError(f"sample fraction p must lie in (0, 1), got {p}")
    graph, oracle = instance.graph, instance.oracle
    n = graph.n_left
    order = _order(order, n)
    skip = sample_rounds(p, n)
    rec = RunRecord("matching", tuple(order), params={"p": p, "solver": solver.kind})
    accepted, used_r = [], set()
    for ell in range(1, n + 1):
        u = order[ell - 1]
        if ell <= skip:
            rec.entries.append(RoundEntry(ell, u))
            continue
        inp = MatchingSolverInput(graph, oracle, order[:ell])
        m = tuple(_call(ell, solver, inp))
        mine = [i for i in m if graph.edges[i][0] == u]
        if not mine:
            rec.entries.append(RoundEntry(ell, u, m, False, None, False))
            continue
        e = mine[0]
        feasible = graph.edges[e][1] not in used_r
        if feasible:
            accepted.append(e)
            used_r.add(graph.edges[e][1])
        rec.entries.append(RoundEntry(ell, u, m, True, feasible, feasible))
    rec.solution = tuple(sorted(accepted))
    rec.value = oracle.value(rec.solution)
    return rec


def _packing(instance, solver, order, seed, skip, variant, params, warnings=()):
    oracle, A, b = instance.oracle, instance.A, instance.b
    n = oracle.n
    order = _order(order, n)
    rec = RunRecord(variant, tuple(order), seed=int(seed), params=params, warnings=list(warnings))
    load = np.zeros(instance.m)
    chosen = []
    for ell in range(1, n + 1):
        j = order[ell - 1]
        if ell <= skip:
            rec.entries.append(RoundEntry(ell, j))
            continue
        poly = PackingPolytope(A, b, ell / n, order[:ell])
        x_tilde = _call(ell, solver, oracle, poly, derive_seed(seed, ell, _SOLVER))
        coin = stream(seed, ell, _ROUNDING).random()
        tentative = bool(coin < x_tilde[j])
        feasible = None
        if tentative:
            feasible = bool(np.all(load + A[:, j] <= b))
            if feasible:
                load += A[:, j]
                chosen.append(j)
        rec.entries.append(RoundEntry(ell, j, x_tilde, tentative, feasible, bool(tentative and feasible)))
    rec.solution = tuple(sorted(chosen))
    rec.value = oracle.value(rec.solution)
    return rec


def run_packing(instance, solver, order, seed):
    """Online packing: fractional solution on the scaled polytope, rounded per round.

    In round ``l`` the solver runs on ``P(l/n, S)`` (constraints scaled by
    ``l/n``, support the revealed items ``S``); the arriving item is tentative
    with probability equal to its fractional value and is accepted when it
    keeps ``A x <= b``.
    """
    if instance.b.min() < 2:
        warnings = ["some capacity b_i < 2; the feasibility-rate guarantee assumes b_i >= 2"]
    else:
        warnings = []
    return _packing(instance, solver, order, seed, 0, "packing", {"solver": solver.kind}, warnings)


def run_packing_known(instance, solver, order, seed):
    """Packing with a sampling phase sized from the known ``B`` and ``d``."""
    B, d = instance.B, instance.d
    warnings = []
    if B < 2:
        warnings.append(f"capacity ratio B = {B} < 2 lies outside the analysed regime")
    p = known_sample_fraction(B, d)
    skip = sample_rounds(p, instance.n)
    params = {"solver": solver.kind, "p": p, "B": B if math.isfinite(B) else None, "d": d}
    return _packing(instance, solver, order, seed, skip, "packing-known", params, warnings)
