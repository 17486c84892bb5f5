"""Closed-form asymptotics and finite-n convergence diagnostics.

Everything is evaluated in log space because n^{n-2} overflows a double
near n = 150.  No excursion-area moment is hard-coded: callers pass E A^k
from DP extrapolation, Monte Carlo or the large-k formula, and the source
label travels with the diagnostic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exact_moments import MomentTable, dp_moments

__all__ = [
    "RatioDiagnostic",
    "ErrorBoundParams",
    "Extrapolation",
    "log_excursion_moment_asymptotic",
    "excursion_moment_asymptotic",
    "log_count_asymptotic",
    "count_asymptotic",
    "stirling_correction",
    "theorem1_ratio",
    "moment_ratio",
    "binomial_vs_raw_ratio",
    "error_bound_curve",
    "extrapolate_moment",
]


@dataclass(frozen=True)
class RatioDiagnostic:
    n: int
    k: int
    ratio: float
    numerator_source: str
    denominator_source: str
    inputs: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ErrorBoundParams:
    c1: float
    c2: float

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("bound constants must be nonnegative")


@dataclass(frozen=True)
class Extrapolation:
    """Least-squares fit value(n) = intercept + slope / sqrt(n)."""

    k: int
    ladder: tuple[int, ...]
    values: tuple[float, ...]
    intercept: float | None
    slope: float | None
    residual: float | None


def log_excursion_moment_asymptotic(k: int) -> float:
    if k <= 0:
        raise ValueError("k must be positive")
    return math.log(3.0 * math.sqrt(2.0) * k) + 0.5 * k * math.log(k / (12.0 * math.e))


def excursion_moment_asymptotic(k: int) -> float:
    """Large-k approximation 3 sqrt(2) k (k / 12e)^{k/2} to E A^k."""
    return math.exp(log_excursion_moment_asymptotic(k))


def log_count_asymptotic(n: int, k: int) -> float:
    if k == 0:
        raise ValueError("the formula needs k >= 1; trees are counted by n^(n-2)")
    if n < 2 or k < 0:
        raise ValueError("need n >= 2 and k >= 1")
    return (
        (n - 2 + 1.5 * k) * math.log(n)
        + 0.5 * k * (1.0 - math.log(12.0 * k))
        + math.log(3.0 / math.sqrt(math.pi))
        + 0.5 * math.log(k)
    )


def count_asymptotic(n: int, k: int) -> tuple[float, float]:
    """(log value, value) of the asymptotic C(n, k); value is inf when it overflows."""
    log_v = log_count_asymptotic(n, k)
    try:
        value = math.exp(log_v)
    except OverflowError:
        value = math.inf
    return log_v, value


def stirling_correction(k: int) -> float:
    """log k! - k log(k/e) - (1/2) log(2 pi k)."""
    return math.lgamma(k + 1) - k * math.log(k / math.e) - 0.5 * math.log(2 * math.pi * k)


def _log_positive(x) -> float:
    if x <= 0:
        raise ValueError("inputs must be positive")
    return math.log(x)


def theorem1_ratio(
    n: int,
    k: int,
    count: int,
    ea_k: float,
    count_source: str = "exact",
    ea_source: str = "given",
) -> RatioDiagnostic:
    """k! C(n, k) / (n^{n + 3k/2 - 2} E A^k); tends to 1 for k = o(n^{1/3})."""
    log_r = (
        math.lgamma(k + 1)
        + _log_positive(count)
        - (n + 1.5 * k - 2) * math.log(n)
        - _log_positive(ea_k)
    )
    return RatioDiagnostic(
        n=n,
        k=k,
        ratio=math.exp(log_r),
        numerator_source=count_source,
        denominator_source=ea_source,
        inputs={"count": count, "ea_k": ea_k},
    )


def moment_ratio(n: int, k: int, scaled_moment: float, ea_k: float,
                 moment_source: str = "dp", ea_source: str = "given") -> RatioDiagnostic:
    """E*[M_n^k] / E A^k."""
    if scaled_moment <= 0 or ea_k <= 0:
        raise ValueError("inputs must be positive")
    return RatioDiagnostic(
        n=n,
        k=k,
        ratio=scaled_moment / ea_k,
        numerator_source=moment_source,
        denominator_source=ea_source,
        inputs={"moment": scaled_moment, "ea_k": ea_k},
    )


def binomial_vs_raw_ratio(t: MomentTable, k: int):
    """k! E*[binom(M, k)] / E*[M^k]; exact Fraction in exact mode."""
    if k > t.k_max:
        raise ValueError(f"table only holds orders up to {t.k_max}")
    if t.raw[k] == 0:
        raise ZeroDivisionError(f"degenerate table at n={t.n}: E*[M^{k}] = 0")
    return math.factorial(k) * t.binomial[k] / t.raw[k]


def error_bound_curve(p: ErrorBoundParams, n: float, k: float) -> float:
    if n < 2:
        raise ValueError("n must be at least 2")
    root = math.sqrt(n)
    return p.c1 * math.log(n) / root + p.c2 * k / root


def extrapolate_moment(
    k: int,
    ladder: Sequence[int],
    values: Sequence[float] | None = None,
) -> Extrapolation:
    """Extrapolate E*[M_n^k] to n = infinity by a fit in 1/sqrt(n).

    ``values`` default to float-DP moments over the ladder.  A single-rung
    ladder cannot be extrapolated; intercept, slope and residual are None.
    """
    ladder = tuple(int(n) for n in ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be strictly ascending")
    if values is None:
        values = [dp_moments(n, k, "float").scaled()[k] for n in ladder]
    values = tuple(float(v) for v in values)
    if len(ladder) < 2:
        warnings.warn("ladder has a single rung; no extrapolation", stacklevel=2)
        return Extrapolation(k, ladder, values, None, None, None)
    x = 1.0 / np.sqrt(np.asarray(ladder, dtype=float))
    design = np.column_stack((np.ones_like(x), x))
    coef, *_ = np.linalg.lstsq(design, np.asarray(values), rcond=None)
    fitted = design @ coef
    residual = float(np.sqrt(np.mean((fitted - np.asarray(values)) ** 2)))
    return Extrapolation(k, ladder, values, float(coef[0]), float(coef[1]), residual)
