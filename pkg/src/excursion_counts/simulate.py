"""Monte Carlo samplers for conditioned queue walks and Brownian excursions.

Conditioned walks are drawn exactly: n - 1 uniform event times are binned
into n unit cells (the walk conditioned on Q_n = 0) and the resulting step
sequence is rotated at its first minimum, which lands on the excursion
event.  Brownian excursions come from a Gaussian grid bridge rotated at its
first grid minimum.

Random numbers come from numpy's PCG64 seeded through ``SeedSequence``
with the stream id as spawn key; normals use numpy's ziggurat
``standard_normal``.  Both are stable across platforms for a fixed numpy.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .paths import QueueWalk, empirical_bridge, queue_walk, reroot_at_min

__all__ = [
    "DEFAULT_SEED",
    "RngStream",
    "GridBridge",
    "GridExcursion",
    "EstimateReport",
    "conditioned_walk_from_uniforms",
    "sample_conditioned_walk",
    "sample_conditioned_walks",
    "bridge_from_increments",
    "sample_bridge",
    "sample_bridges",
    "vervaat",
    "vervaat_batch",
    "excursion_area",
    "estimate_moments",
    "coupling_gap",
]

DEFAULT_SEED = 20130917

# rows per batch are chosen so a batch holds about this many entries
_BATCH_ENTRIES = 1 << 22


class _ZeroGenerator:
    """Stand-in generator returning zeros; a test hook for noise-free runs."""

    def standard_normal(self, size=None):
        return np.zeros(size)

    def random(self, size=None):
        return np.zeros(size)


@dataclass(frozen=True)
class RngStream:
    seed: int = DEFAULT_SEED
    stream_id: int = 0
    zero: bool = False

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer")

    def generator(self):
        if self.zero:
            return _ZeroGenerator()
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id, self.zero)


def _as_generator(rng):
    if rng is None:
        return RngStream().generator()
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class GridBridge:
    values: np.ndarray

    @property
    def m(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class GridExcursion:
    values: np.ndarray

    @property
    def m(self) -> int:
        return len(self.values) - 1


@dataclass(frozen=True)
class EstimateReport:
    label: str
    size: int
    orders: tuple[int, ...]
    estimates: tuple[float, ...]
    std_errors: tuple[float, ...]
    samples: int
    seed: int
    workers: int

    def rows(self):
        for j, est, se in zip(self.orders, self.estimates, self.std_errors):
            yield {
                "kind": self.label,
                "size": self.size,
                "j": j,
                "estimate": est,
                "std_error": se,
                "samples": self.samples,
                "seed": self.seed,
                "workers": self.workers,
            }


# --- conditioned queue walks -------------------------------------------------


def _bin_counts(u: np.ndarray, n: int) -> np.ndarray:
    """Counts of each row of ``u`` in the n cells [k/n, (k+1)/n)."""
    rows = u.shape[0]
    cells = np.minimum((u * n).astype(np.int64), n - 1)
    flat = cells + n * np.arange(rows)[:, None]
    return np.bincount(flat.ravel(), minlength=rows * n).reshape(rows, n)


def _reroot_rows(steps: np.ndarray) -> np.ndarray:
    n = steps.shape[1]
    sigma = np.argmin(np.cumsum(steps, axis=1), axis=1) + 1
    idx = (sigma[:, None] + np.arange(n)[None, :]) % n
    return np.take_along_axis(steps, idx, axis=1)


def _walk_batch(n: int, rows: int, gen) -> np.ndarray:
    """Z-increments of ``rows`` conditioned walks, shape (rows, n)."""
    u = gen.random((rows, n - 1))
    z = _bin_counts(u, n)
    return _reroot_rows(z - 1) + 1


def sample_conditioned_walks(n: int, count: int, rng=None) -> np.ndarray:
    """Z-increments of ``count`` independent excursion-conditioned walks."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return _walk_batch(n, count, _as_generator(rng))


def conditioned_walk_from_uniforms(uniforms: Sequence[float], n: int | None = None) -> QueueWalk:
    sample = empirical_bridge(uniforms, n)
    shifted = reroot_at_min(sample.steps()).shifted
    return queue_walk([s + 1 for s in shifted])


def sample_conditioned_walk(n: int, rng=None) -> QueueWalk:
    if n < 2:
        raise ValueError("n must be at least 2")
    u = _as_generator(rng).random(n - 1)
    return conditioned_walk_from_uniforms(np.asarray(u).tolist(), n)


def _walk_areas(z: np.ndarray) -> np.ndarray:
    """Unscaled m = sum_{i=1}^{n-1} (Q_i - 1) for each row of increments."""
    s = np.cumsum(z - 1, axis=1)
    return s[:, :-1].sum(axis=1)


# --- Brownian bridges and excursions -----------------------------------------


def bridge_from_increments(increments: Sequence[float]) -> GridBridge:
    """b_i = beta_i - (i/m) beta_m, where beta is the running sum of the increments."""
    d = np.asarray(increments, dtype=float)
    m = d.size
    beta = np.concatenate(([0.0], np.cumsum(d)))
    b = beta - (np.arange(m + 1) / m) * beta[-1]
    b[0] = 0.0
    b[-1] = 0.0
    return GridBridge(values=b)


def sample_bridge(m: int, rng=None) -> GridBridge:
    if m < 2:
        raise ValueError("grid size must be at least 2")
    gen = _as_generator(rng)
    return bridge_from_increments(np.asarray(gen.standard_normal(m)) / math.sqrt(m))


def sample_bridges(m: int, count: int, rng=None) -> np.ndarray:
    """``count`` grid bridges as rows of a (count, m + 1) array."""
    gen = _as_generator(rng)
    d = np.asarray(gen.standard_normal((count, m))) / math.sqrt(m)
    beta = np.zeros((count, m + 1))
    np.cumsum(d, axis=1, out=beta[:, 1:])
    b = beta - (np.arange(m + 1) / m)[None, :] * beta[:, -1:]
    b[:, 0] = 0.0
    b[:, -1] = 0.0
    return b


def vervaat(b: GridBridge | Sequence[float]) -> GridExcursion:
    vals = b.values if isinstance(b, GridBridge) else np.asarray(b, dtype=float)
    return GridExcursion(values=vervaat_batch(vals[None, :])[0])


def vervaat_batch(b: np.ndarray) -> np.ndarray:
    """Rotate every row at its first grid minimum (indices 0..m-1; m is identified with 0)."""
    m = b.shape[1] - 1
    cyc = b[:, :m]
    sigma = np.argmin(cyc, axis=1)
    idx = (sigma[:, None] + np.arange(m)[None, :]) % m
    e = np.empty_like(b)
    e[:, :m] = np.take_along_axis(cyc, idx, axis=1) - cyc[np.arange(len(cyc)), sigma][:, None]
    e[:, m] = 0.0
    return e


def excursion_area(e: GridExcursion | Sequence[float], rule: Literal["left", "trapezoid"] = "left") -> float:
    vals = e.values if isinstance(e, GridExcursion) else np.asarray(e, dtype=float)
    m = len(vals) - 1
    if rule == "left":
        return math.fsum(vals[:m]) / m
    if rule == "trapezoid":
        return (math.fsum(vals) - 0.5 * (vals[0] + vals[-1])) / m
    raise ValueError(f"unknown quadrature rule {rule!r}")


# --- estimation ---------------------------------------------------------------


@dataclass
class _Moments:
    """Running count, means and centred second moments per order (Chan et al. merge)."""

    count: int
    mean: np.ndarray
    m2: np.ndarray

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        mean = x.mean(axis=0)
        return cls(len(x), mean, ((x - mean) ** 2).sum(axis=0))

    def merge(self, other: "_Moments") -> "_Moments":
        if self.count == 0:
            return other
        if other.count == 0:
            return self
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / n)
        m2 = self.m2 + other.m2 + delta**2 * (self.count * other.count / n)
        return _Moments(n, mean, m2)


def _chunk_sizes(total: int, workers: int) -> list[int]:
    base, extra = divmod(total, workers)
    return [base + (1 if c < extra else 0) for c in range(workers)]


def _chunk_stats(kind: str, size: int, k: int, rows: int, rng: RngStream, rule: str) -> _Moments:
    gen = rng.generator()
    powers = np.arange(1, k + 1)
    acc = _Moments(0, np.zeros(k), np.zeros(k))
    per_batch = max(1, _BATCH_ENTRIES // (size + 1))
    done = 0
    while done < rows:
        b = min(per_batch, rows - done)
        if kind == "walk":
            z = _walk_batch(size, b, gen)
            x = _walk_areas(z) / (size - 1) ** 1.5
        else:
            e = vervaat_batch(sample_bridges(size, b, gen))
            x = e[:, :size].sum(axis=1) / size
            if rule == "trapezoid":
                x = x - 0.5 * (e[:, 0] + e[:, -1]) / size
        acc = acc.merge(_Moments.of(x[:, None] ** powers[None, :]))
        done += b
    return acc


def estimate_moments(
    kind: Literal["walk", "excursion"],
    size: int,
    k: int,
    samples: int,
    rng: RngStream | None = None,
    workers: int = 1,
    rule: Literal["left", "trapezoid"] = "left",
) -> EstimateReport:
    """Monte Carlo estimates of E*[M_n^j] (walk) or E[A^j] (excursion), j = 1..k.

    ``samples`` are split into ``workers`` contiguous chunks; chunk c draws
    from stream c of the seed and chunks are merged in order, so the report
    depends only on (seed, workers, samples).
    """
    if kind not in ("walk", "excursion"):
        raise ValueError(f"unknown kind {kind!r}")
    if k < 1:
        raise ValueError("k must be at least 1")
    if samples < 1 or workers < 1:
        raise ValueError("samples and workers must be positive")
    if kind == "walk" and size < 2:
        raise ValueError("walk size n must be at least 2")
    if kind == "excursion" and size < 2:
        raise ValueError("grid size must be at least 2")
    rng = rng if rng is not None else RngStream()
    sizes = _chunk_sizes(samples, workers)
    jobs = [(kind, size, k, rows, rng.substream(c), rule) for c, rows in enumerate(sizes)]
    if workers == 1:
        parts = [_chunk_stats(*jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _chunk_stats(*job), jobs))
    total = _Moments(0, np.zeros(k), np.zeros(k))
    for part in parts:
        total = total.merge(part)
    if samples > 1:
        se = np.sqrt(total.m2 / (samples - 1) / samples)
    else:
        se = np.full(k, math.nan)
    return EstimateReport(
        label=kind,
        size=size,
        orders=tuple(range(1, k + 1)),
        estimates=tuple(float(v) for v in total.mean),
        std_errors=tuple(float(v) for v in se),
        samples=samples,
        seed=rng.seed,
        workers=workers,
    )


# --- coupling diagnostic ------------------------------------------------------


def coupling_gap(uniforms: Sequence[float]) -> float:
    """sup_t |X_{n+1}(t) - G_n(t)| for n uniforms, computed exactly.

    X_{n+1} is the walk path read off the counts at the grid k/(n+1), and
    G_n the empirical process of the same points.  Between consecutive grid
    points and jumps both are simple (constant and linear), so the supremum
    is attained at, or approached from the left of, those event times.
    """
    u = np.sort(np.asarray(uniforms, dtype=float))
    n = u.size
    if n < 1:
        raise ValueError("need at least one uniform")
    if u[0] < 0.0 or u[-1] >= 1.0:
        raise ValueError("uniforms must lie in [0, 1)")
    root = math.sqrt(n)
    grid = np.arange(n + 1) / (n + 1)
    walk = (np.searchsorted(u, grid, side="right") - np.arange(n + 1)) / root
    times = np.unique(np.concatenate((grid, u)))
    ends = np.append(times[1:], 1.0)
    hits = np.searchsorted(u, times, side="right")
    piece = np.searchsorted(grid, times, side="right") - 1
    x = walk[piece]
    at_start = np.abs(x - (hits - n * times) / root)
    before_end = np.abs(x - (hits - n * ends) / root)
    return float(max(at_start.max(), before_end.max()))
