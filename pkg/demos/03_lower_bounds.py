"""
Fooling sets and the rectangle bound
====================================

Pairs of sets with the same sum, arranged so that no combinatorial
rectangle can cover two of them with a single value, force a
deterministic protocol to use many distinct transcripts. Counting them
gives a lower bound on the bits any protocol must send.
"""

from reconciled.rectangles import (bounds_report, comm_lower_bound, literature_bounds,
                                   sum_fooling_families)

for fam in sum_fooling_families(2):
    print(f"family {fam.label}: value {fam.common_value}, {fam.size} pairs")
    for pair in fam.pairs[:3]:
        print("   ", pair.y, "|", pair.y_prime)

for kind in ("sum", "product"):
    for n in (2, 3):
        rep = bounds_report(kind, n)
        print(f"{kind:7s} n={n}: {rep['count_lower_bound']:4d} rectangles -> "
              f"{rep['comm_lower_bound_bits']} bits (checks passed: {rep['pass']})")

print("\n n   lower bound   trivial upper bound")
for n in range(2, 11):
    print(f"{n:2d}   {comm_lower_bound(n, 'sum'):11d}   {2**n + 2 * n - 2:19d}")

print("\nreference bounds at n=8:", literature_bounds(8))
