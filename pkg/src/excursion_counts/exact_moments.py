"""Exact moments of the excursion area by dynamic programming.

The DP runs over states (i, q): after i steps the queue walk sits at
Q_i = q.  On the excursion event only 1 <= q <= n - i is reachable for
1 <= i <= n - 1, since each step drops by at most one.  Every state carries
the weighted power sums sum_w w * area^j for j = 0..k, updated on entry.

Exact mode weights a path z by the multinomial (n-1)! / prod z_i!, which
keeps all arithmetic in Python integers: moving from Q_i = q to
Q_{i+1} = q' multiplies by binom(q' + i, q' - q + 1).  The grand total is
then n^{n-2} and E*[binom(M, k)] * n^{n-2} is an integer by construction.
The Poisson factor e^{-n} is common to all paths and never appears.

Float mode uses the 1/z! weights directly, measures area in units of
(n-1)^{3/2} and renormalises every step, tracking the log scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from operator import mul
from typing import Literal, Sequence, Union

import numpy as np

__all__ = [
    "DEFAULT_MAX_EXACT_N",
    "MomentTable",
    "StirlingTriangle",
    "stirling_first",
    "dp_moments",
    "binomial_moments",
    "spencer_count",
    "excursion_weight",
    "excursion_weight_closed_form",
    "max_excess",
    "SpencerIntegralityError",
]

DEFAULT_MAX_EXACT_N = 60

Arithmetic = Literal["exact", "float"]
Number = Union[Fraction, float]


class SpencerIntegralityError(ArithmeticError):
    """n^{n-2} E*[binom(M, k)] came out non-integral; the DP is broken."""


@dataclass(frozen=True)
class MomentTable:
    """Conditional moments E*[M^j] and E*[binom(M, j)] for j = 0..k_max.

    In exact mode every entry is a :class:`fractions.Fraction`; in float mode
    they are floats and ``log_total_weight`` is the reliable form of the
    weight, since ``total_weight`` overflows past n of roughly 700.
    """

    n: int
    k_max: int
    raw: tuple[Number, ...]
    binomial: tuple[Number, ...] | None
    total_weight: Number
    arithmetic: str = "exact"
    log_total_weight: float = field(default=float("nan"), compare=False)

    @property
    def exact(self) -> bool:
        return self.arithmetic == "exact"

    def scaled(self) -> tuple[float, ...]:
        """E*[M_n^j] = E*[M^j] / (n-1)^{3j/2} as floats."""
        base = (self.n - 1) ** 1.5
        return tuple(float(r) / base**j for j, r in enumerate(self.raw))


class StirlingTriangle:
    """Signed Stirling numbers of the first kind, s(k, j) for 0 <= j <= k <= k_max."""

    def __init__(self, k_max: int):
        rows = [[1]]
        for k in range(k_max):
            prev = rows[-1] + [0]
            rows.append([(prev[j - 1] if j else 0) - k * prev[j] for j in range(k + 2)])
        self.k_max = k_max
        self.rows = rows

    def __call__(self, k: int, j: int) -> int:
        if not 0 <= j <= k <= self.k_max:
            return 0
        return self.rows[k][j]


@lru_cache(maxsize=None)
def stirling_first(k_max: int) -> StirlingTriangle:
    return StirlingTriangle(k_max)


def max_excess(n: int) -> int:
    """Largest feasible k: the complete graph has n + k - 1 edges."""
    return n * (n - 1) // 2 - n + 1


def _binomial_rows(k: int) -> list[list[int]]:
    return [[math.comb(j, l) for l in range(j + 1)] for j in range(k + 1)]


def _dp_exact(n: int, k: int) -> list[int]:
    """Integer power sums of the area, weighted by multinomial path counts."""
    pascal = [[1]]
    for y in range(1, n):
        prev = pascal[-1]
        pascal.append([1] + [prev[z - 1] + prev[z] for z in range(1, y)] + [1])
    binrows = _binomial_rows(k)
    # cols[j][q - 1] is the power sum of order j at queue value q
    cols = [[1]] + [[0] for _ in range(k)]
    for i in range(n - 1):
        q_next = n - i - 1
        q_prev = len(cols[0])
        new = [[0] * q_next for _ in range(k + 1)]
        for qn in range(1, q_next + 1):
            row = pascal[qn + i]
            top = min(qn + 1, q_prev)
            # source q = 1..top jumps with z = qn + 1 - q
            coeffs = row[qn + 1 - top : qn + 1][::-1]
            for j in range(k + 1):
                new[j][qn - 1] = sum(map(mul, coeffs, cols[j][:top]))
        if k:
            for qn in range(2, q_next + 1):
                a = qn - 1
                pw = [a**e for e in range(k + 1)]
                vals = [new[j][qn - 1] for j in range(k + 1)]
                for j in range(1, k + 1):
                    br = binrows[j]
                    new[j][qn - 1] = sum(br[l] * pw[j - l] * vals[l] for l in range(j + 1))
        cols = new
    # last step: Q_{n-1} = 1 -> Q_n = 0 with z = 0, weight 1
    return [c[0] for c in cols]


@lru_cache(maxsize=64)
def _dp_exact_cached(n: int, k: int) -> tuple[int, ...]:
    return tuple(_dp_exact(n, k))


def _log_inverse_factorials(size: int) -> np.ndarray:
    return -np.array([math.lgamma(z + 1.0) for z in range(size)])


def _dp_float(n: int, k: int) -> tuple[list[float], float]:
    """Scaled-area power sums normalised by the total weight, plus log W(n)."""
    unit = (n - 1) ** 1.5
    inv_fact = np.exp(_log_inverse_factorials(n + 1))
    # kernel[qn - 1, q - 1] = 1 / (qn - q + 1)!
    idx = np.arange(n)
    zmat = idx[:, None] - idx[None, :] + 1
    kernel = np.where(zmat >= 0, inv_fact[np.clip(zmat, 0, n)], 0.0)
    binrows = _binomial_rows(k)

    sums = np.zeros((1, k + 1))
    sums[0, 0] = 1.0
    log_scale = 0.0
    for i in range(n - 1):
        q_next = n - i - 1
        q_prev = sums.shape[0]
        new = kernel[:q_next, :q_prev] @ sums
        if k:
            a = (np.arange(1, q_next + 1) - 1) / unit
            pw = [np.ones(q_next)]
            for _ in range(k):
                pw.append(pw[-1] * a)
            old = new.copy()
            for j in range(1, k + 1):
                new[:, j] = sum(binrows[j][l] * pw[j - l] * old[:, l] for l in range(j + 1))
        peak = new[:, 0].max()
        new /= peak
        log_scale += math.log(peak)
        sums = new
    final = sums[0]
    log_w = log_scale + math.log(final[0])
    return [float(v / final[0]) for v in final], log_w


def dp_moments(
    n: int,
    k: int,
    arithmetic: Arithmetic = "exact",
    max_exact_n: int = DEFAULT_MAX_EXACT_N,
) -> MomentTable:
    """Conditional raw and binomial moments of the area M given the excursion event."""
    if n < 2:
        raise ValueError("dp_moments needs n >= 2")
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if arithmetic == "exact":
        if n > max_exact_n:
            raise ValueError(
                f"exact mode is limited to n <= {max_exact_n}; use arithmetic='float' "
                "or raise max_exact_n"
            )
        power_sums = _dp_exact_cached(n, k)
        total = power_sums[0]
        raw = tuple(Fraction(s, total) for s in power_sums)
        weight = Fraction(total, math.factorial(n - 1))
        table = MomentTable(
            n=n,
            k_max=k,
            raw=raw,
            binomial=None,
            total_weight=weight,
            arithmetic="exact",
            log_total_weight=math.log(total) - math.lgamma(n),
        )
    elif arithmetic == "float":
        scaled, log_w = _dp_float(n, k)
        unit = (n - 1) ** 1.5
        raw = tuple(s * unit**j for j, s in enumerate(scaled))
        table = MomentTable(
            n=n,
            k_max=k,
            raw=raw,
            binomial=None,
            total_weight=math.exp(log_w) if log_w < 700 else math.inf,
            arithmetic="float",
            log_total_weight=log_w,
        )
    else:
        raise ValueError(f"unknown arithmetic mode {arithmetic!r}")
    return binomial_moments(table)


def binomial_moments(t: MomentTable) -> MomentTable:
    """Fill E*[binom(M, j)] = (1/j!) sum_i s(j, i) E*[M^i]."""
    st = stirling_first(t.k_max)
    out = []
    for j in range(t.k_max + 1):
        acc = sum(st(j, i) * t.raw[i] for i in range(j + 1))
        if t.exact:
            out.append(Fraction(acc) / math.factorial(j))
        else:
            out.append(float(acc) / math.factorial(j))
    return replace(t, binomial=tuple(out))


def spencer_count(n: int, k: int, max_exact_n: int | None = None) -> int:
    """C(n, k) as n^{n-2} E*[binom(M, k)], checked to be an integer."""
    if n < 2:
        raise ValueError("spencer_count needs n >= 2")
    if k < 0 or k > max_excess(n):
        warnings.warn(f"k={k} infeasible for n={n}; returning 0", stacklevel=2)
        return 0
    ceiling = max(n, DEFAULT_MAX_EXACT_N) if max_exact_n is None else max_exact_n
    table = dp_moments(n, k, "exact", max_exact_n=ceiling)
    value = table.binomial[k] * n ** (n - 2)
    if value.denominator != 1:
        raise SpencerIntegralityError(f"n^(n-2) E*[binom(M,{k})] = {value} at n={n}")
    return value.numerator


def excursion_weight(n: int, arithmetic: Arithmetic = "exact", max_exact_n: int | None = None) -> Number:
    """W(n): the sum over excursion-compatible z of prod 1/z_i!."""
    if arithmetic == "exact":
        ceiling = max(n, DEFAULT_MAX_EXACT_N) if max_exact_n is None else max_exact_n
        return dp_moments(n, 0, "exact", max_exact_n=ceiling).total_weight
    return dp_moments(n, 0, "float").total_weight


def excursion_weight_closed_form(n: int) -> Fraction:
    return Fraction(n ** (n - 2), math.factorial(n - 1))


def log_convex(values: Sequence[Number]) -> bool:
    """True when v_j^2 <= v_{j-1} v_{j+1} for every interior j."""
    return all(values[j] ** 2 <= values[j - 1] * values[j + 1] for j in range(1, len(values) - 1))
