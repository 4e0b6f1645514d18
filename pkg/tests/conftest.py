import numpy as np
import pytest

from ttp_cosolver import Instance, parse_instance

TINY3_TEXT = """\
PROBLEM NAME: tiny3
KNAPSACK DATA TYPE: hand-made
DIMENSION: 3
NUMBER OF ITEMS: 2
CAPACITY OF KNAPSACK: 3
MIN SPEED: 0.1
MAX SPEED: 1.0
RENTING RATIO: 1
EDGE_WEIGHT_TYPE: CEIL_2D
NODE_COORD_SECTION\t(INDEX, X, Y):
1\t0\t0
2\t3\t0
3\t0\t4
ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):
1\t20\t2\t2
2\t30\t3\t3
"""


@pytest.fixture
def tiny3_text():
    return TINY3_TEXT


@pytest.fixture
def tiny3():
    return parse_instance(TINY3_TEXT)


@pytest.fixture
def tiny3_file(tmp_path):
    path = tmp_path / "tiny3.ttp"
    path.write_text(TINY3_TEXT)
    return path


def make_instance(coords, items, capacity, v_min=0.1, v_max=1.0, renting_ratio=1.0, name="t"):
    """items: (profit, weight, 0-based city) triples."""
    items = list(items)
    return Instance(name, coords,
                    [p for p, _, _ in items], [w for _, w, _ in items], [c for _, _, c in items],
                    capacity, v_min, v_max, renting_ratio)


def tour_0(ids):
    """1-based tour ids as a 0-based array."""
    return np.asarray(ids) - 1


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
