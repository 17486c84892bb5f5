"""Counting connected graphs through Poisson queue excursions.

C(n, k) counts connected graphs on n labelled vertices with n + k - 1
edges.  Condition a walk with mean-one Poisson increments on staying
positive until it dies at step n; then n^{n-2} E*[binom(M, k)], with M the
area under the walk, is exactly C(n, k).  This script checks that against
exhaustive enumeration and the component recurrence.
"""

from excursion_counts import brute_force_count, dp_moments, recurrence_count, spencer_count
from excursion_counts.exact_moments import max_excess

# At n = 4 there are five excursion paths, so the moments are small fractions.
t = dp_moments(4, 3)
print("n=4 total weight", t.total_weight)
for j in range(4):
    print(f"  j={j}  E*[M^j]={t.raw[j]}  E*[binom(M,j)]={t.binomial[j]}")

print("\n n  k  spencer  recurrence  brute")
for n in range(2, 7):
    for k in range(min(3, max_excess(n)) + 1):
        print(f"{n:2d} {k:2d} {spencer_count(n, k):8d} {recurrence_count(n, k):11d} {brute_force_count(n, k):6d}")

# Larger n is out of reach for enumeration but not for the DP.
print("\nC(40, 5) =", spencer_count(40, 5))
print("agrees with recurrence:", spencer_count(40, 5) == recurrence_count(40, 5))
