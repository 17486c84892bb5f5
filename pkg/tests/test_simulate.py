import math

import numpy as np
import pytest

from excursion_counts.exact_moments import dp_moments
from excursion_counts.paths import is_excursion, queue_walk
from excursion_counts.simulate import (
    RngStream,
    _walk_batch,
    bridge_from_increments,
    conditioned_walk_from_uniforms,
    coupling_gap,
    estimate_moments,
    excursion_area,
    sample_bridge,
    sample_bridges,
    sample_conditioned_walk,
    sample_conditioned_walks,
    vervaat,
    vervaat_batch,
)


class FixedUniforms:
    def __init__(self, u):
        self.u = np.asarray(u, dtype=float)

    def random(self, size):
        return self.u.reshape(size)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_n2_walk_is_unique(seed):
    w = sample_conditioned_walk(2, RngStream(seed))
    assert w.z == (1, 0) and w.m == 0


def test_forced_uniforms():
    w = conditioned_walk_from_uniforms((0.1, 0.2), 3)
    assert w.z == (2, 0, 0) and w.q == (1, 2, 1, 0) and w.m == 1
    w = conditioned_walk_from_uniforms((0.5, 0.9), 3)
    assert w.z == (1, 1, 0) and w.m == 0


def test_batch_sampler_matches_scalar_reroot():
    rng = np.random.default_rng(5)
    for n in (2, 3, 7, 31):
        u = rng.random((200, n - 1))
        z = _walk_batch(n, 200, FixedUniforms(u))
        for row, urow in zip(z, u):
            assert tuple(row) == conditioned_walk_from_uniforms(urow.tolist(), n).z


def test_every_sample_is_an_excursion():
    for n in (3, 10, 57):
        z = sample_conditioned_walks(n, 10**5 // n, RngStream(11, n))
        q = 1 + np.cumsum(z - 1, axis=1)
        assert (q[:, :-1] > 0).all() and (q[:, -1] == 0).all()
    w = sample_conditioned_walk(40, RngStream(3))
    assert is_excursion(w)


def test_n3_frequencies():
    n_samples = 10**6
    z = sample_conditioned_walks(3, n_samples, RngStream(2024))
    p = (z[:, 0] == 2).mean()
    se = math.sqrt((1 / 3) * (2 / 3) / n_samples)
    assert abs(p - 1 / 3) < 3 * se
    assert ((z[:, 0] == 1).mean() + p) == 1.0


def test_zero_bridge():
    b = sample_bridge(5, RngStream(zero=True))
    assert (b.values == 0).all()
    assert (vervaat(b).values == 0).all()


def test_bridge_from_increments():
    c = 1 / math.sqrt(3)
    b = bridge_from_increments(np.array([1, -2, 1]) * c).values
    assert b == pytest.approx([0, c, -c, 0], abs=1e-15)
    assert b[0] == 0.0 and b[-1] == 0.0


def test_bridge_midpoint_variance():
    m, n_samples = 10, 10**5
    b = sample_bridges(m, n_samples, RngStream(7))
    var = b[:, m // 2].var(ddof=1)
    se = 0.25 * math.sqrt(2 / n_samples)
    assert abs(var - 0.25) < 3 * se
    assert (b[:, 0] == 0).all() and (b[:, -1] == 0).all()


def test_vervaat_examples():
    assert list(vervaat([0, 1, -1, 0]).values) == [0, 1, 2, 0]
    assert list(vervaat([0, 0.5, 0.2, 0]).values) == [0, 0.5, 0.2, 0]


def test_vervaat_adversarial():
    # repeated minimum: the first one wins
    e = vervaat([0, -1, 2, -1, 0]).values
    assert list(e) == [0, 3, 0, 1, 0]
    e = vervaat([0, 0, 0]).values
    assert list(e) == [0, 0, 0]


def test_vervaat_nonnegative_many():
    b = sample_bridges(50, 10**5, RngStream(8))
    e = vervaat_batch(b)
    assert (e >= 0).all()
    assert (e[:, 0] == 0).all() and (e[:, -1] == 0).all()


def test_excursion_area():
    assert excursion_area([0, 1, 2, 0]) == 1.0
    assert excursion_area([0, 0, 0, 0]) == 0.0
    c = 0.37
    assert excursion_area([0, c, c, 0]) == pytest.approx(2 * c / 3)
    # endpoints vanish, so the trapezoid rule coincides with the left sum
    assert excursion_area([0, 1, 2, 0], rule="trapezoid") == 1.0


def test_walk_n2_moments_are_zero():
    r = estimate_moments("walk", 2, 3, 1000, RngStream(1))
    assert r.estimates == (0.0, 0.0, 0.0)
    assert r.std_errors == (0.0, 0.0, 0.0)


def test_walk_n4_mean():
    r = estimate_moments("walk", 4, 1, 10**6, RngStream(7))
    exact = (15 / 16) / 3**1.5
    assert abs(r.estimates[0] - exact) < 3 * r.std_errors[0]


@pytest.mark.parametrize("n", [3, 4, 5, 10])
def test_walk_moments_match_dp(n):
    r = estimate_moments("walk", n, 3, 4 * 10**5, RngStream(31, n), workers=2)
    exact = dp_moments(n, 3).scaled()
    for j in (1, 2, 3):
        assert abs(r.estimates[j - 1] - exact[j]) < 3 * r.std_errors[j - 1]


def test_determinism():
    a = estimate_moments("excursion", 64, 2, 5000, RngStream(4), workers=3)
    b = estimate_moments("excursion", 64, 2, 5000, RngStream(4), workers=3)
    assert a == b
    c = estimate_moments("walk", 9, 2, 5000, RngStream(4), workers=1)
    d = estimate_moments("walk", 9, 2, 5000, RngStream(4), workers=1)
    assert c == d


def test_single_sample_has_undefined_se():
    r = estimate_moments("excursion", 3, 1, 1, RngStream(zero=True))
    assert r.estimates == (0.0,)
    assert math.isnan(r.std_errors[0])


def test_rng_stream_bounds():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(0, 2**64)


def dense_gap(u, points=200_001):
    """Sup of |X - G| over a fine grid of t; a lower bound converging to the exact value."""
    u = np.sort(u)
    n = len(u)
    t = np.linspace(0, 1, points)[:-1]
    k = np.floor(t * (n + 1)).astype(int)
    x = (np.searchsorted(u, k / (n + 1), side="right") - k) / math.sqrt(n)
    g = (np.searchsorted(u, t, side="right") - n * t) / math.sqrt(n)
    return np.abs(x - g).max()


def test_coupling_gap_single_point():
    # X_2 = 0 on both halves; G_1 = -t before 1/2 and 1 - t from 1/2 on
    assert coupling_gap([0.5]) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
def test_coupling_gap_against_dense_grid(n):
    u = np.random.default_rng(n).random(n)
    exact = coupling_gap(u)
    approx = dense_gap(u)
    assert approx <= exact + 1e-12
    assert exact - approx < 3 * n / 200_000 + 1e-9


@pytest.mark.parametrize("n", [10, 100, 1000])
def test_coupling_gap_equally_spaced(n):
    # Just after the last point G_n = 1/(2 sqrt n) while X_{n+1} = -1/sqrt n,
    # so the gap is 3/(2 sqrt n).  The drift term t/sqrt(n) in X - G must be
    # kept in the bound, which then reads 1/sqrt(n) + 1/((n+1) sqrt n) + osc.
    u = (np.arange(1, n + 1) - 0.5) / n
    gap = coupling_gap(u)
    assert gap == pytest.approx(1.5 / math.sqrt(n), rel=1e-9)
    g = lambda t: (np.searchsorted(u, t, side="right") - n * t) / math.sqrt(n)
    grid = np.arange(n + 1) / (n + 1)
    fine = np.linspace(0, 1, 50 * n, endpoint=False)
    osc = np.abs(g(fine) - g(grid[np.floor(fine * (n + 1)).astype(int)])).max()
    assert gap <= osc + 1 / ((n + 1) * math.sqrt(n)) + 1 / math.sqrt(n) + 1e-12


@pytest.mark.slow
def test_coupling_gap_growth_is_at_most_logarithmic():
    gen = np.random.default_rng(2)
    ladder = (10**2, 10**3, 10**4)
    medians = []
    for n in ladder:
        medians.append(np.median([math.sqrt(n) * coupling_gap(gen.random(n)) for _ in range(10**4)]))
    slope = np.polyfit(np.log(np.log(ladder)), np.log(medians), 1)[0]
    assert slope <= 1.0
    ratios = [m / math.log(n) for m, n in zip(medians, ladder)]
    assert ratios[0] >= ratios[1] >= ratios[2]
