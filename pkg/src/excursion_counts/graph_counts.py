"""Exact counts C(n, k) of connected labelled graphs with n + k - 1 edges.

Two independent routes: exhaustive enumeration of edge subsets for tiny n
and the classical recurrence that peels off the component of vertex 1.
Results can be kept in a :class:`GraphCountTable` and persisted as text.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np

from .exact_moments import max_excess, spencer_count

__all__ = [
    "CACHE_VERSION",
    "BRUTE_FORCE_MAX_N",
    "PROVENANCES",
    "GraphCountTable",
    "CacheFormatError",
    "CountMismatchError",
    "brute_force_count",
    "recurrence_count",
    "count",
    "RECURRENCE_MAX_N",
    "save_cache",
    "load_cache",
]

CACHE_VERSION = "1"
BRUTE_FORCE_MAX_N = 7
PROVENANCES = ("brute_force", "recurrence", "spencer")
_HEADER_PREFIX = "graphcounts v"


class CacheFormatError(ValueError):
    pass


class CountMismatchError(ValueError):
    pass


@dataclass
class GraphCountTable:
    """C(n, k) values keyed by (n, k), one value per provenance."""

    entries: dict[tuple[int, int], dict[str, int]] = field(default_factory=dict)
    version: str = CACHE_VERSION

    def add(self, n: int, k: int, value: int, provenance: str) -> None:
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        if value < 0:
            raise ValueError("counts are nonnegative")
        slot = self.entries.setdefault((n, k), {})
        for other, v in slot.items():
            if v != value:
                raise CountMismatchError(
                    f"C({n},{k}): {provenance} gives {value} but {other} gives {v}"
                )
        slot[provenance] = value

    def get(self, n: int, k: int, provenance: str | None = None) -> int | None:
        slot = self.entries.get((n, k))
        if not slot:
            return None
        if provenance is None:
            return next(iter(slot.values()))
        return slot.get(provenance)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def records(self):
        for n, k in sorted(self.entries):
            for prov in sorted(self.entries[(n, k)]):
                yield n, k, prov, self.entries[(n, k)][prov]


def _feasible(n: int, k: int) -> bool:
    return n >= 1 and 0 <= k <= max_excess(n)


@lru_cache(maxsize=None)
def _connected_histogram(n: int) -> tuple[int, ...]:
    """Number of connected graphs on n labelled vertices by edge count."""
    edges = list(combinations(range(n), 2))
    n_edges = len(edges)
    hist = np.zeros(n_edges + 1, dtype=np.int64)
    full = (1 << n) - 1
    chunk = 1 << 20
    for start in range(0, 1 << n_edges, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n_edges), dtype=np.uint64)
        bits = [(masks >> np.uint64(e)) & np.uint64(1) for e in range(n_edges)]
        adj = [np.zeros_like(masks) for _ in range(n)]
        for e, (a, b) in enumerate(edges):
            adj[a] |= bits[e] << np.uint64(b)
            adj[b] |= bits[e] << np.uint64(a)
        # grow the component of vertex 0 until it stops changing
        reach = np.ones_like(masks)
        for _ in range(n - 1):
            grown = reach.copy()
            for v in range(n):
                has_v = (reach >> np.uint64(v)) & np.uint64(1)
                grown |= adj[v] * has_v
            reach = grown
        connected = reach == np.uint64(full)
        size = sum(bits) if bits else np.zeros_like(masks)
        hist += np.bincount(size[connected].astype(np.int64), minlength=n_edges + 1)
    return tuple(int(h) for h in hist)


def brute_force_count(n: int, k: int, max_n: int = BRUTE_FORCE_MAX_N) -> int:
    """Enumerate every edge subset of size n + k - 1 on n labelled vertices."""
    if n > max_n:
        raise ValueError(f"brute force is capped at n <= {max_n}; use recurrence_count")
    if n < 1:
        raise ValueError("n must be positive")
    if not _feasible(n, k):
        return 0
    return _connected_histogram(n)[n + k - 1]


@lru_cache(maxsize=None)
def _all_graphs(a: int, b: int) -> int:
    return math.comb(a * (a - 1) // 2, b)


def _connected_by_edges(n: int, m: int, memo: dict[tuple[int, int], int]) -> int:
    """c(n, m) from the component containing vertex 1; fills memo bottom-up."""
    for j in range(1, n + 1):
        top = min(j * (j - 1) // 2, m)
        for p in range(j - 1, top + 1):
            if (j, p) in memo:
                continue
            total = _all_graphs(j, p)
            for size in range(1, j):
                rest = j - size
                inner = 0
                for pp in range(size - 1, min(size * (size - 1) // 2, p) + 1):
                    inner += memo[(size, pp)] * _all_graphs(rest, p - pp)
                total -= math.comb(j - 1, size - 1) * inner
            memo[(j, p)] = total
    return memo.get((n, m), 0)


def recurrence_count(n: int, k: int, cache: GraphCountTable | None = None) -> int:
    """C(n, k) by the vertex-1 component recurrence with exact integers.

    Intermediate values are written into ``cache`` with provenance
    ``recurrence``, so later calls reuse them.
    """
    if not _feasible(n, k):
        return 0
    if cache is None:
        cache = GraphCountTable()
    hit = cache.get(n, k, "recurrence")
    if hit is not None:
        return hit
    memo = {
        (nn, nn + kk - 1): slot["recurrence"]
        for (nn, kk), slot in cache.entries.items()
        if "recurrence" in slot
    }
    fresh = set(memo)
    value = _connected_by_edges(n, n + k - 1, memo)
    for (nn, mm), v in memo.items():
        if (nn, mm) not in fresh:
            cache.add(nn, mm - nn + 1, v, "recurrence")
    return value


# the recurrence table costs roughly n^2 m^2 big-integer products
RECURRENCE_MAX_N = 100


def count(n: int, k: int, cache: GraphCountTable | None = None) -> tuple[int, str]:
    """C(n, k) from the recurrence, or the exact DP once the recurrence gets slow.

    Returns (value, provenance).  Cached values of any provenance are reused.
    """
    if cache is not None:
        for prov in PROVENANCES:
            hit = cache.get(n, k, prov)
            if hit is not None:
                return hit, prov
    if not _feasible(n, k):
        return 0, "recurrence"
    if n <= RECURRENCE_MAX_N:
        value, prov = recurrence_count(n, k, cache), "recurrence"
    else:
        value, prov = spencer_count(n, k, max_exact_n=n), "spencer"
    if cache is not None:
        cache.add(n, k, value, prov)
    return value, prov


def save_cache(t: GraphCountTable, path: str | os.PathLike) -> None:
    lines = [f"{_HEADER_PREFIX}{t.version}"]
    lines += [f"{n} {k} {prov} {value}" for n, k, prov, value in t.records()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_cache(path: str | os.PathLike) -> GraphCountTable:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not lines[0].startswith(_HEADER_PREFIX):
        raise CacheFormatError(f"{path}: line 1: missing '{_HEADER_PREFIX}N' header")
    version = lines[0][len(_HEADER_PREFIX):].strip()
    if version != CACHE_VERSION:
        raise CacheFormatError(
            f"{path}: cache version {version!r} does not match current version {CACHE_VERSION!r}"
        )
    table = GraphCountTable(version=version)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        try:
            if len(parts) != 4:
                raise ValueError(f"expected 4 fields, got {len(parts)}")
            n, k, prov, value = int(parts[0]), int(parts[1]), parts[2], int(parts[3])
            table.add(n, k, value, prov)
        except (ValueError, CountMismatchError) as exc:
            raise CacheFormatError(f"{path}: line {lineno}: bad record {line!r}: {exc}") from exc
    if not text.endswith("\n"):
        raise CacheFormatError(f"{path}: line {len(lines)}: truncated record {lines[-1]!r}")
    return table
