"""
How the guarantees scale
========================

Closed-form competitive ratios for the k-secretary problem with an exact
solver and with greedy, and the sample fraction of the known-(B, d) packing
variant.
"""

import math

from subsecretary.bounds import (bound_greedy_k_secretary, bound_k_secretary, greedy_limit,
                                 known_sample_fraction)

# %%
print("      k   exact   greedy")
for k in (1, 2, 3, 5, 10, 100, 10**4, 10**6):
    print(f"{k:>7}  {bound_k_secretary(k).value:.4f}  {bound_greedy_k_secretary(k).value:.4f}")
print(f"  limit  {1 / math.e:.4f}  {greedy_limit():.4f}")

# %%
# With B and d known, the sampling phase can be much longer.
print("\n B  d  sampled share")
for B in (2, 3, 5):
    for d in (1, 2, 4):
        print(f"{B:>2} {d:>2}  {known_sample_fraction(B, d):.4f}")
