"""Scaled walk areas approach the Brownian excursion area.

E*[M_n] from the float DP drifts towards the mean area under a Brownian
excursion; a fit in 1/sqrt(n) extrapolates it.  A Gaussian grid bridge
rotated at its minimum (Vervaat) gives an independent Monte Carlo value.
"""

import math

from excursion_counts import (
    ErrorBoundParams,
    RngStream,
    binomial_vs_raw_ratio,
    dp_moments,
    error_bound_curve,
    estimate_moments,
    excursion_moment_asymptotic,
    extrapolate_moment,
    theorem1_ratio,
)
from excursion_counts.graph_counts import count

ladder = (50, 100, 200, 400)
fit = extrapolate_moment(1, ladder)
print("E*[M_n] on the ladder:", [round(v, 5) for v in fit.values])
print(f"extrapolated {fit.intercept:.5f} (fit residual {fit.residual:.2e})")

mc = estimate_moments("excursion", 1000, 2, 20_000, RngStream(3), workers=2)
print(f"Monte Carlo E[A] = {mc.estimates[0]:.5f} +- {mc.std_errors[0]:.5f}, E[A^2] = {mc.estimates[1]:.5f}")

for n in ladder[:3]:
    c, source = count(n, 1)
    print(f"n={n}: k! C(n,1) / (n^(n-1/2) E A) = {theorem1_ratio(n, 1, c, fit.intercept).ratio:.4f}  [{source}]")

print("\nk!E*[binom(M,k)]/E*[M^k] at k=2:")
for n in (10, 20, 40, 80):
    print(f"  n={n}: {binomial_vs_raw_ratio(dp_moments(n, 2, 'float'), 2):.5f}")

print("\nlarge-k formula for E A^k:", [f"{excursion_moment_asymptotic(k):.4g}" for k in (1, 2, 5, 10)])
bound = ErrorBoundParams(c1=1.0, c2=1.0)
print("bound shape log n/sqrt n + k/sqrt n at k=1:",
      [round(error_bound_curve(bound, n, 1), 4) for n in ladder])
