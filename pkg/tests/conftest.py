import numpy as np
import pytest

from bloomrf import Filter, layered_config

EXAMPLE_KEYS = (129, 131, 160, 211)
# seed under which the leaf tree over [128, 143] shares the layer-1 element,
# so layer-1 position 3 is a false positive and exactly one leaf element is fetched
EXAMPLE_SEED = 1


def example_config(seed=EXAMPLE_SEED):
    return layered_config(8, (0, 4, 4), (32,), seed=seed)


@pytest.fixture
def example_filter():
    f = Filter(example_config())
    for k in EXAMPLE_KEYS:
        f.insert(k)
    return f


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
