"""
Secretary matching and the collision audit
==========================================

Left vertices of a bipartite graph arrive online.  The first half is only
observed.  Afterwards each arrival is matched along the edge the offline
matching on the current prefix assigns to it, provided the right endpoint is
still free.  The analysis rests on one fact: in round l, the edge proposed
for the arriving vertex is still available with probability at least
(ceil(n/2) - 1)/(l - 1).  Here we measure that probability.
"""

from subsecretary.bounds import bound_matching
from subsecretary.harness import AlgorithmConfig, check_matching_collision_rate, estimate_ratio
from subsecretary.instances import gen_matching

# %%
inst = gen_matching(10, 4, 0.7, seed=5)
print(f"|L| = {inst.n}, |R| = 4, {len(inst.graph.edges)} edges")

stats = estimate_ratio(inst, AlgorithmConfig("matching", "brute-force"), 2000, seed=1)
print(f"mean ratio {stats.mean_ratio:.3f} +- {stats.std_err:.3f}; "
      f"guarantee alpha/4 = {bound_matching(1.0).value:.3f}")

# %%
# Per round: how often a proposed edge was still free, against the bound.
audit = check_matching_collision_rate(stats, inst.n)
print("\nround proposals  free-rate  bound")
for row in audit.rows:
    if row["tentative"]:
        print(f"{row['round']:>5} {row['tentative']:>9}  {row['rate']:>9.3f}  {row['bound']:.3f}")
print("audit", "passed" if audit.passed else "FAILED")
