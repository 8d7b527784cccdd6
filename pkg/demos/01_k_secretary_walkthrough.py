"""
A k-secretary run, round by round
=================================

Ten items arrive in random order and we may keep at most k = 3 of them.
The algorithm only watches the first ceil(n/e) - 1 arrivals.  After that it
re-solves the offline problem on everything seen so far and accepts the new
item whenever the offline solution contains it and there is still room.
"""

from subsecretary.bounds import bound_greedy_k_secretary, bound_k_secretary
from subsecretary.harness import AlgorithmConfig, estimate_ratio
from subsecretary.instances import gen_cardinality
from subsecretary.offline import GreedySolver, brute_force_cardinality
from subsecretary.online import ArrivalOrder, run_k_secretary

# %%
# A small coverage instance, so the exact optimum is cheap to enumerate.
inst = gen_cardinality(10, 3, "coverage", seed=1)
opt = brute_force_cardinality(inst.oracle, range(inst.n), inst.k)
print(f"offline optimum {opt} has value {inst.oracle.value(opt):.2f}")

# %%
# One arrival order, with the greedy solver re-run on every prefix.
order = ArrivalOrder.random(inst.n, 7, 0, 0)
rec = run_k_secretary(inst.oracle, inst.k, GreedySolver(inst.k), order)
print("\nround item  prefix solution   accepted")
for e in rec.entries:
    sol = "(watching)" if e.solution is None else str(list(e.solution))
    print(f"{e.round:>5} {e.item:>4}  {sol:<17} {'yes' if e.accepted else ''}")
print(f"kept {list(rec.solution)} worth {rec.value:.2f}")

# %%
# Averaged over 2000 random orders, the ratio sits well above the guarantee.
guarantees = {"brute-force": bound_k_secretary(inst.k).value,
              "greedy": bound_greedy_k_secretary(inst.k).value}
for solver, bound in guarantees.items():
    stats = estimate_ratio(inst, AlgorithmConfig("k-secretary", solver), 2000, seed=3)
    print(f"{solver:>11}: mean ratio {stats.mean_ratio:.3f} +- {stats.std_err:.3f}, "
          f"guarantee {bound:.3f}")
