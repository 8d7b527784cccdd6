"""
Online packing with a fractional solver
=======================================

Items arrive in random order and each accepted item consumes capacity in m
packing constraints A x <= b.  In round l the algorithm runs continuous
greedy over the polytope scaled by l/n, rounds the arriving item's
coordinate with a coin, and accepts it when the result still fits.  Early
rounds should see a tentative item fit at least half of the time.
"""

import numpy as np

from subsecretary.bounds import bound_packing, packing_audit_rounds
from subsecretary.harness import AlgorithmConfig, check_packing_feasible_rate, estimate_ratio
from subsecretary.instances import capacity_ratio, column_sparsity, gen_packing

# %%
inst = gen_packing(60, 4, B=3, d=2, family="coverage", seed=2)
B, d = capacity_ratio(inst.A, inst.b), column_sparsity(inst.A)
print(f"n={inst.n} m={inst.m}: capacity ratio B={B}, column sparsity d={d}")

# %%
# Every run is checked for a capacity breach after each accepted item.
breaches = 0


def audit(rec):
    global breaches
    load = np.zeros(inst.m)
    for e in rec.entries:
        if e.accepted:
            load += inst.A[:, e.item]
            breaches += bool(np.any(load > inst.b))


config = AlgorithmConfig("packing", "continuous-greedy", steps=50, mc_samples=500)
stats = estimate_ratio(inst, config, 100, seed=9, on_record=audit)
print(f"mean ratio vs fractional optimum {stats.mean_ratio:.3f} +- {stats.std_err:.3f}")
print(f"capacity breaches: {breaches}")
rep = bound_packing(1 - 1 / np.e, B, d)
print(f"guarantee: a constant times alpha d^(-2/(B-1)) = {rep.value:.3f}")

# %%
rates = check_packing_feasible_rate(stats, inst.n, B, d)
print(f"\naudit window: rounds 1..{packing_audit_rounds(inst.n, B, d)}")
for row in rates.rows:
    if row["tentative"]:
        print(f"round {row['round']}: {row['feasible']}/{row['tentative']} tentative items fit")
print("audit", "passed" if rates.passed else "FAILED")
