import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from kframe import FrameFamily, KreinSpace
from kframe.testgen import random_jframe, random_spec

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DOUBLED_DUAL_ROWS = [
    (0.5, 0.5, -0.5),
    (1.0, 0.5, -1.0),
    (0.0, 0.0, 0.5),
    (0.5, -0.5, 0.5),
    (-1.0, 0.5, 1.0),
    (0.0, 0.0, 0.5),
]


@pytest.fixture
def space3():
    return KreinSpace((1, 1, -1))


@pytest.fixture
def doubled(space3):
    return FrameFamily(space3, np.hstack([np.eye(3), np.eye(3)]))


@pytest.fixture
def doubled_dual(space3):
    return FrameFamily(space3, np.array(DOUBLED_DUAL_ROWS).T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def jframes(draw, dim_range=(1, 6), excess_range=(0, 4), **kwargs):
    seed = draw(seeds)
    spec = random_spec(np.random.default_rng(seed), dim_range, excess_range, **kwargs)
    return random_jframe(spec)


# acceptance summary: one line per criterion at the end of the run
_criteria = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        for key, value in report.user_properties:
            if key == "criterion":
                crit = value
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[crit] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    from test_acceptance import CRITERIA

    terminalreporter.section("acceptance criteria")
    for num, text in CRITERIA.items():
        outcome = _criteria.get(num)
        mark = {"passed": "PASS", "failed": "FAIL"}.get(outcome, "NOT RUN")
        terminalreporter.write_line(f"criterion {num:2d}: {mark}  {text}")
