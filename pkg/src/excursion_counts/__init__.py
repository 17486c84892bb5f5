"""Connected graph counts and the area under a Brownian excursion.

Exact small-n checks of C(n, k) = n^{n-2} E*[binom(M, k)] through a
rational DP over Poisson queue walks, independent graph-count oracles,
samplers for conditioned walks and Brownian excursions, and asymptotic
ratio diagnostics.
"""

from .asymptotics import (
    ErrorBoundParams,
    RatioDiagnostic,
    binomial_vs_raw_ratio,
    count_asymptotic,
    error_bound_curve,
    excursion_moment_asymptotic,
    extrapolate_moment,
    theorem1_ratio,
)
from .exact_moments import MomentTable, binomial_moments, dp_moments, excursion_weight, spencer_count
from .graph_counts import GraphCountTable, brute_force_count, load_cache, recurrence_count, save_cache
from .paths import (
    QueueWalk,
    StepSequence,
    cyclic_shift,
    empirical_bridge,
    is_excursion,
    queue_walk,
    reroot_at_min,
    scaled_area,
)
from .simulate import (
    RngStream,
    coupling_gap,
    estimate_moments,
    excursion_area,
    sample_bridge,
    sample_conditioned_walk,
    vervaat,
)

__version__ = "0.1.0"
