"""Re-rooting at the minimum turns bridges into excursions.

A step sequence with entries >= -1 and sum -1 has exactly one rotation
whose walk first reaches -1 at the last step: the rotation at the first
minimum.  Dropping n - 1 uniform points into n cells gives the walk
conditioned on ending at -1, so rotating it samples the excursion exactly,
without rejection.
"""

import numpy as np

from excursion_counts import RngStream, cyclic_shift, reroot_at_min
from excursion_counts.paths import first_hits_minus_one_at_end
from excursion_counts.simulate import conditioned_walk_from_uniforms, sample_conditioned_walks

x = (-1, 0, 2, -1, -1)
print("steps", x)
for i in range(1, len(x) + 1):
    shifted = cyclic_shift(x, i)
    print(f"  shift {i}: {shifted.steps}  excursion-rooted={first_hits_minus_one_at_end(shifted)}")
r = reroot_at_min(x)
print("reroot_at_min picks sigma =", r.sigma)

w = conditioned_walk_from_uniforms((0.5, 0.9), 3)
print("\nuniforms (0.5, 0.9) at n=3 ->", w.z, "queue", w.q)

# Only two excursions exist at n = 3; their probabilities are 1/3 and 2/3.
z = sample_conditioned_walks(3, 200_000, RngStream(1))
print("freq z=(2,0,0):", (z[:, 0] == 2).mean(), " (exact 1/3)")
