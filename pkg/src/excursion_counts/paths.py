"""Integer lattice walks: the Poisson queue walk, excursions and re-rooting.

Indices are 0-based internally.  A cyclic shift by ``i`` moves the first
``i`` entries to the back, so shifting by 0 and by ``n`` are both the
identity, matching the 1-based ``x_{(i+j) mod n}`` convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import accumulate
from typing import Sequence

__all__ = [
    "StepSequence",
    "QueueWalk",
    "RerootResult",
    "EmpiricalProcessSample",
    "ScaledPath",
    "queue_walk",
    "walk_from_steps",
    "is_excursion",
    "cyclic_shift",
    "first_hits_minus_one_at_end",
    "reroot_at_min",
    "empirical_bridge",
    "scaled_path",
    "scaled_area",
]


@dataclass(frozen=True)
class StepSequence:
    """Steps of a skip-free-downward walk; every entry is at least -1."""

    steps: tuple[int, ...]

    def __init__(self, steps: Sequence[int]):
        steps = tuple(int(s) for s in steps)
        if not steps:
            raise ValueError("empty step sequence")
        bad = [s for s in steps if s < -1]
        if bad:
            raise ValueError(f"step {bad[0]} is below -1")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def partial_sums(self) -> list[int]:
        """s_1, ..., s_n (s_0 = 0 is omitted)."""
        return list(accumulate(self.steps))

    @property
    def total(self) -> int:
        return sum(self.steps)


@dataclass(frozen=True)
class QueueWalk:
    z: tuple[int, ...]
    q: tuple[int, ...]
    m: int

    @property
    def n(self) -> int:
        return len(self.z)

    def steps(self) -> StepSequence:
        return StepSequence([zi - 1 for zi in self.z])


@dataclass(frozen=True)
class RerootResult:
    shifted: StepSequence
    sigma: int


@dataclass(frozen=True)
class EmpiricalProcessSample:
    uniforms: tuple[float, ...]
    f_at_grid: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.f_at_grid) - 1

    def steps(self) -> StepSequence:
        f = self.f_at_grid
        return StepSequence([f[k] - f[k - 1] for k in range(1, len(f))])

    def bin_counts(self) -> tuple[int, ...]:
        return tuple(s + 1 for s in self.steps())


@dataclass(frozen=True)
class ScaledPath:
    """Piecewise-constant path on ``n - 1`` equal pieces of [0, 1]."""

    values: tuple[float, ...]
    scale: float

    def __call__(self, t: float) -> float:
        if not 0.0 <= t <= 1.0:
            raise ValueError("t must lie in [0, 1]")
        if t == 1.0:
            return 0.0
        return self.values[int(t * len(self.values))]

    def area(self) -> float:
        return math.fsum(self.values) / len(self.values)


def queue_walk(z: Sequence[int]) -> QueueWalk:
    """Build Q_0 = 1, Q_i = Q_{i-1} + z_i - 1 and the area m = sum_{i=1}^{n-1} (Q_i - 1)."""
    z = tuple(int(v) for v in z)
    if not z:
        raise ValueError("empty step sequence")
    if any(v < 0 for v in z):
        raise ValueError("Poisson counts must be nonnegative")
    q = (1,) + tuple(1 + s for s in accumulate(v - 1 for v in z))
    m = sum(qi - 1 for qi in q[1:-1])
    return QueueWalk(z=z, q=q, m=m)


def walk_from_steps(x: StepSequence | Sequence[int]) -> QueueWalk:
    return queue_walk([s + 1 for s in x])


def is_excursion(w: QueueWalk) -> bool:
    q = w.q
    return q[-1] == 0 and all(v > 0 for v in q[1:-1])


def cyclic_shift(x: StepSequence | Sequence[int], i: int) -> StepSequence:
    steps = tuple(x)
    n = len(steps)
    if not 0 <= i <= n:
        raise ValueError(f"shift {i} outside 0..{n}")
    i %= n
    return StepSequence(steps[i:] + steps[:i])


def first_hits_minus_one_at_end(x: StepSequence | Sequence[int]) -> bool:
    """True iff the partial sums stay >= 0 before step n and equal -1 at step n."""
    sums = list(accumulate(x))
    return sums[-1] == -1 and all(s >= 0 for s in sums[:-1])


def reroot_at_min(x: StepSequence | Sequence[int]) -> RerootResult:
    """Rotate a bridge step sequence (sum -1) at the first minimum of its partial sums.

    ``sigma`` is 1-based, in 1..n.  The rotated walk first reaches -1 at
    step n, and no other rotation does.
    """
    x = x if isinstance(x, StepSequence) else StepSequence(x)
    sums = x.partial_sums()
    if sums[-1] != -1:
        raise ValueError(f"not a bridge sequence: steps sum to {sums[-1]}, expected -1")
    low = min(sums)
    sigma = sums.index(low) + 1
    return RerootResult(shifted=cyclic_shift(x, sigma), sigma=sigma)


def empirical_bridge(uniforms: Sequence[float], n: int | None = None) -> EmpiricalProcessSample:
    """Bin ``n - 1`` uniforms into ``n`` half-open cells [k/n, (k+1)/n).

    ``f_at_grid[k]`` is (number of points below k/n) - k.  A point sitting
    exactly on k/n belongs to the cell to its right.
    """
    u = tuple(float(v) for v in uniforms)
    if n is None:
        n = len(u) + 1
    if len(u) != n - 1:
        raise ValueError(f"expected {n - 1} uniforms for n={n}, got {len(u)}")
    for v in u:
        if not 0.0 <= v < 1.0:
            raise ValueError(f"uniform value {v} outside [0, 1)")
    counts = [0] * n
    for v in u:
        counts[min(int(v * n), n - 1)] += 1
    f = (0,) + tuple(accumulate(c - 1 for c in counts))
    return EmpiricalProcessSample(uniforms=u, f_at_grid=f)


def scaled_path(w: QueueWalk) -> ScaledPath:
    n = w.n
    if n < 2:
        raise ValueError("scaled path needs n >= 2")
    scale = 1.0 / math.sqrt(n - 1)
    return ScaledPath(values=tuple((qi - 1) * scale for qi in w.q[: n - 1]), scale=scale)


def scaled_area(w: QueueWalk) -> float:
    """M_n = m / (n-1)^{3/2}, the area of the rescaled path."""
    n = w.n
    if n < 2:
        raise ValueError("scaled area needs n >= 2")
    if not is_excursion(w):
        warnings.warn("scaled_area called on a walk outside the excursion event", stacklevel=2)
    return w.m / (n - 1) ** 1.5
