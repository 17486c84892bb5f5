import math
from itertools import accumulate

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excursion_counts.paths import (
    StepSequence,
    cyclic_shift,
    empirical_bridge,
    first_hits_minus_one_at_end,
    is_excursion,
    queue_walk,
    reroot_at_min,
    scaled_area,
    scaled_path,
)


@pytest.mark.parametrize(
    "z, q, m",
    [
        ((2, 0, 0), (1, 2, 1, 0), 1),
        ((1, 1, 1, 0), (1, 1, 1, 1, 0), 0),
        ((3, 0, 0, 0), (1, 3, 2, 1, 0), 3),
    ],
)
def test_queue_walk(z, q, m):
    w = queue_walk(z)
    assert w.q == q
    assert w.m == m


def test_queue_walk_rejects_empty_and_negative():
    with pytest.raises(ValueError, match="empty step sequence"):
        queue_walk([])
    with pytest.raises(ValueError):
        queue_walk([1, -1])


@pytest.mark.parametrize("z, expected", [((2, 0, 0), True), ((0, 2, 0), False), ((2, 0, 1), False)])
def test_is_excursion(z, expected):
    assert is_excursion(queue_walk(z)) is expected


def test_cyclic_shift_examples():
    assert cyclic_shift((-1, 1, -1), 1).steps == (1, -1, -1)
    assert cyclic_shift((5, 6, 7), 3).steps == (5, 6, 7)
    assert cyclic_shift((5, 6, 7), 0).steps == (5, 6, 7)
    assert cyclic_shift((1, -1, 0, -1), 2).steps == (0, -1, 1, -1)


def test_cyclic_shift_range():
    with pytest.raises(ValueError):
        cyclic_shift((1, -1), 3)
    with pytest.raises(ValueError):
        cyclic_shift((1, -1), -1)


def test_step_sequence_validation():
    with pytest.raises(ValueError):
        StepSequence([0, -2])
    with pytest.raises(ValueError, match="empty"):
        StepSequence([])


@pytest.mark.parametrize(
    "x, sigma", [((1, -1, -1), 3), ((-1, 1, -1), 1), ((-1, -1, 1), 2)]
)
def test_reroot_examples(x, sigma):
    r = reroot_at_min(x)
    assert r.sigma == sigma
    assert r.shifted.steps == (1, -1, -1)


def test_reroot_errors():
    with pytest.raises(ValueError, match="not a bridge sequence"):
        reroot_at_min((1, -1))
    with pytest.raises(ValueError):
        reroot_at_min((1, -2))


@st.composite
def bridge_steps(draw, max_n=200):
    """Entries >= -1 summing to -1: binned counts minus one, then shuffled."""
    n = draw(st.integers(1, max_n))
    cells = draw(st.lists(st.integers(0, n - 1), min_size=n - 1, max_size=n - 1))
    counts = [0] * n
    for c in cells:
        counts[c] += 1
    return [c - 1 for c in counts]


@settings(max_examples=300, deadline=None)
@given(bridge_steps())
def test_reroot_finds_the_unique_good_shift(x):
    n = len(x)
    good = [i for i in range(1, n + 1) if first_hits_minus_one_at_end(cyclic_shift(x, i))]
    r = reroot_at_min(x)
    assert good == [r.sigma]


@settings(max_examples=200, deadline=None)
@given(bridge_steps())
def test_reroot_idempotent(x):
    once = reroot_at_min(x)
    twice = reroot_at_min(once.shifted)
    assert twice.sigma == len(x)
    assert twice.shifted == once.shifted


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-1, 5), min_size=1, max_size=50), st.data())
def test_shift_preserves_multiset_and_sum(x, data):
    i = data.draw(st.integers(0, len(x)))
    y = cyclic_shift(x, i)
    assert sorted(y) == sorted(x)
    assert sum(y) == sum(x)


@pytest.mark.parametrize(
    "uniforms, n, f",
    [((0.1, 0.2), 3, (0, 1, 0, -1)), ((0.1, 0.5), 3, (0, 0, 0, -1)), ((), 1, (0, -1))],
)
def test_empirical_bridge_examples(uniforms, n, f):
    assert empirical_bridge(uniforms, n).f_at_grid == f


def test_empirical_bridge_boundary_goes_right():
    # 1/3 sits on the boundary between cells one and two
    assert empirical_bridge((1 / 3, 0.9), 3).bin_counts() == (0, 1, 1)


def test_empirical_bridge_rejects_out_of_range():
    with pytest.raises(ValueError):
        empirical_bridge((1.0,), 2)
    with pytest.raises(ValueError):
        empirical_bridge((-0.1,), 2)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1, exclude_max=True), max_size=60))
def test_empirical_bridge_steps_form_a_bridge(u):
    sample = empirical_bridge(u)
    steps = sample.steps()
    assert sum(steps) == -1
    assert min(steps) >= -1
    assert sample.f_at_grid[0] == 0 and sample.f_at_grid[-1] == -1


@pytest.mark.parametrize(
    "z, expected", [((1, 0), 0.0), ((2, 1, 0, 0), 2 / 3**1.5), ((3, 0, 0, 0), 3**-0.5)]
)
def test_scaled_area(z, expected):
    assert scaled_area(queue_walk(z)) == pytest.approx(expected, rel=1e-15)


def test_scaled_area_matches_riemann_sum_of_path():
    w = queue_walk((3, 0, 0, 0))
    path = scaled_path(w)
    assert path.area() == pytest.approx(scaled_area(w), rel=1e-15)
    assert path(1.0) == 0.0
    assert path(0.5) == pytest.approx((w.q[1] - 1) / math.sqrt(3))


def test_scaled_area_warns_off_excursion():
    with pytest.warns(UserWarning):
        scaled_area(queue_walk((0, 2, 0)))
    with pytest.raises(ValueError):
        scaled_area(queue_walk((0,)))


@settings(max_examples=200, deadline=None)
@given(bridge_steps(max_n=80))
def test_area_conventions_agree_on_excursions(x):
    w = queue_walk([s + 1 for s in reroot_at_min(x).shifted])
    assert is_excursion(w)
    n = w.n
    assert w.m == sum(q - 1 for q in w.q[0:n])
    assert list(accumulate(s for s in reroot_at_min(x).shifted))[-1] == -1
