"""Distance between the walk path and the empirical process.

For n uniforms, X_{n+1} reads the counts off the grid k/(n+1) while G_n is
the centred empirical distribution function scaled by sqrt(n).  Their sup
distance is computed exactly; sqrt(n) times it grows only logarithmically.
"""

import math

import numpy as np

from excursion_counts import coupling_gap

gen = np.random.default_rng(0)
for n in (100, 1000, 10_000):
    draws = [math.sqrt(n) * coupling_gap(gen.random(n)) for _ in range(500)]
    med = float(np.median(draws))
    print(f"n={n:6d}  median sqrt(n)*gap = {med:.3f}   / log n = {med / math.log(n):.3f}")

n = 100
even = (np.arange(1, n + 1) - 0.5) / n
print("equally spaced points, n=100:", coupling_gap(even), "= 1.5/sqrt(n)")
