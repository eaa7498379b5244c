import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hsflow.datasets import make_atom_datum, make_intro_datum, make_random_datum
from hsflow.lagrangian import build

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("stress", max_examples=400, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HSFLOW_HYPOTHESIS_PROFILE", "default"))

seeds = st.integers(min_value=0, max_value=2**31 - 1)
times = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


def random_param(seed):
    return build(make_random_datum(seed))


@pytest.fixture
def intro():
    return build(make_intro_datum())


@pytest.fixture
def atom():
    return build(make_atom_datum(1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS, key=lambda k: (int(str(k).rstrip("b")), str(k))):
            terminalreporter.write_line(RESULTS[key])
