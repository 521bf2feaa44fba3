import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

from oltk.step import StepFunction, Weight

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def step_functions(draw, max_pieces=12, signed=True):
    n = draw(st.integers(1, max_pieces))
    lens = draw(st.lists(st.floats(0.05, 2.0), min_size=n, max_size=n))
    pool = draw(st.lists(st.floats(0.1, 5.0), min_size=1, max_size=max(1, n // 2 + 1)))
    idx = draw(st.lists(st.integers(0, len(pool) - 1), min_size=n, max_size=n))
    vals = np.array([pool[i] for i in idx])
    if signed:
        signs = draw(st.lists(st.sampled_from([-1.0, 0.0, 1.0]), min_size=n, max_size=n))
        vals = vals * np.array(signs)
    if not np.any(vals):
        vals[0] = pool[0]
    return StepFunction(np.concatenate(([0.0], np.cumsum(lens))), vals)


@st.composite
def weights(draw, max_pieces=4):
    m = draw(st.integers(0, max_pieces))
    tail = draw(st.floats(0.2, 1.5))
    lens = draw(st.lists(st.floats(0.1, 1.5), min_size=m, max_size=m))
    mult = sorted(draw(st.lists(st.floats(1.0, 5.0), min_size=m, max_size=m)), reverse=True)
    return Weight(np.concatenate(([0.0], np.cumsum(lens))), tail * np.array(mult), tail)


@pytest.fixture
def unit_weight():
    return Weight.constant(1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
