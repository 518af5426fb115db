import math
import sys

import pytest

from picardcheck.maps import MapUnderTest
from picardcheck.metric import MetricSpaceHandle, PairSampler


def scalar_map(f, lo, hi, name="T", **kw):
    return MapUnderTest(MetricSpaceHandle.interval(lo, hi, **kw), lambda x: (f(x[0]),), name)


@pytest.fixture
def halving():
    return scalar_map(lambda x: x / 2, -10, 10, "halving")


@pytest.fixture
def doubling():
    return scalar_map(lambda x: 2 * x, 0, 1, "doubling")


@pytest.fixture
def x_plus_inv_x():
    return scalar_map(lambda x: x + 1 / x, 1, 101, "x_plus_inv_x")


@pytest.fixture
def cos_map():
    return scalar_map(math.cos, -10, 10, "cos")


@pytest.fixture
def sampler():
    return PairSampler("uniform", 1000, 0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(k, *mod.RESULTS[k]))
