import math
from fractions import Fraction
from itertools import product

import pytest

from excursion_counts.paths import is_excursion, queue_walk


def excursion_sequences(n):
    """Every z in {0..n-1}^n whose queue walk lies in the excursion event."""
    for z in product(range(n), repeat=n):
        if sum(z) == n - 1:
            w = queue_walk(z)
            if is_excursion(w):
                yield w


def enumerated_moments(n, k):
    """Brute-force E*[M^j], E*[binom(M,j)] and the total weight by listing every excursion."""
    weight = Fraction(0)
    raw = [Fraction(0)] * (k + 1)
    binom = [Fraction(0)] * (k + 1)
    for w in excursion_sequences(n):
        p = Fraction(1, math.prod(math.factorial(v) for v in w.z))
        weight += p
        for j in range(k + 1):
            raw[j] += p * w.m**j
            binom[j] += p * math.comb(w.m, j)
    return weight, [r / weight for r in raw], [b / weight for b in binom]


@pytest.fixture(scope="session")
def enumerated():
    return {n: enumerated_moments(n, 4) for n in range(2, 7)}


_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion reported in the summary")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label = dict(report.user_properties).get("acceptance")
        if label:
            _ACCEPTANCE.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")


@pytest.fixture
def criterion(request, record_property):
    marker = request.node.get_closest_marker("acceptance")
    record_property("acceptance", marker.args[0])
    return marker.args[0]
