import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ttp_cosolver import (InstanceFormatError, distance, format_instance, group_items_by_city,
                          parse_instance, random_instance)

from conftest import TINY3_TEXT, make_instance


def header(n=1, m=0, cap="10", vmin="0.1", vmax="1.0", r="1"):
    return (f"PROBLEM NAME: x\nKNAPSACK DATA TYPE: t\nDIMENSION: {n}\nNUMBER OF ITEMS: {m}\n"
            f"CAPACITY OF KNAPSACK: {cap}\nMIN SPEED: {vmin}\nMAX SPEED: {vmax}\n"
            f"RENTING RATIO: {r}\nEDGE_WEIGHT_TYPE: CEIL_2D\n")


def test_parse_tiny3(tiny3):
    assert (tiny3.n, tiny3.m) == (3, 2)
    assert tiny3.capacity == 3 and tiny3.renting_ratio == 1
    assert [c.tolist() for c in tiny3.items_by_city] == [[], [0], [1]]
    assert tiny3.items[0].city == 2 and tiny3.cities[2].y == 4


def test_single_city_speed_coeff():
    inst = parse_instance(header() + "NODE_COORD_SECTION (INDEX, X, Y):\n1 0 0\n"
                          "ITEMS SECTION (INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):\n")
    assert inst.n == 1 and inst.m == 0
    assert inst.speed_coeff == (1.0 - 0.1) / 10
    assert inst.speed_coeff == pytest.approx(0.09, abs=1e-15)


def test_header_counts_like_benchmark_file():
    rng = np.random.default_rng(3)
    coords = "".join(f"{i + 1} {x} {y}\n" for i, (x, y) in enumerate(rng.integers(0, 2000, (52, 2))))
    items = "".join(f"{k + 1} {rng.integers(1, 1000)} {rng.integers(1000, 1010)} {k % 51 + 2}\n"
                    for k in range(255))
    text = (header(52, 255, cap="23653") + "NODE_COORD_SECTION\t(INDEX, X, Y):\n" + coords
            + "ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):\n" + items)
    inst = parse_instance(text)
    assert (inst.n, inst.m) == (52, 255)
    assert sum(len(ix) for ix in inst.items_by_city) == 255


def test_whitespace_and_case_tolerance():
    text = TINY3_TEXT.replace("DIMENSION: 3", "dimension :   3").replace("1\t20\t2\t2", "  1   20  2   2  ")
    inst = parse_instance(text)
    assert inst.n == 3 and inst.profits[0] == 20


def test_unknown_header_key_warns():
    with pytest.warns(UserWarning, match="COMMENT"):
        inst = parse_instance("COMMENT: hello\n" + TINY3_TEXT)
    assert inst.n == 3


@pytest.mark.parametrize("mutate, line", [
    (lambda t: t.replace("DIMENSION: 3", "DIMENSION: three"), 3),
    (lambda t: t.replace("CAPACITY OF KNAPSACK: 3", "CAPACITY OF KNAPSACK: 0"), 5),
    (lambda t: t.replace("MIN SPEED: 0.1", "MIN SPEED: -0.1"), 6),
    (lambda t: t.replace("MAX SPEED: 1.0", "MAX SPEED: 0.1"), 7),
    (lambda t: t.replace("2\t30\t3\t3", "2\t30\t3\t4"), 16),
    (lambda t: t.replace("2\t30\t3\t3", "2\t30\t0\t3"), 16),
    (lambda t: t.replace("3\t0\t4\n", ""), 13),
])
def test_malformed_inputs_report_line(tiny3_text, mutate, line):
    with pytest.raises(InstanceFormatError) as err:
        parse_instance(mutate(tiny3_text))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_item_count_mismatch(tiny3_text):
    with pytest.raises(InstanceFormatError, match="1 of 2"):
        parse_instance(tiny3_text.replace("2\t30\t3\t3\n", ""))


def test_zero_profit_item_accepted(tiny3_text):
    inst = parse_instance(tiny3_text.replace("1\t20\t2\t2", "1\t0\t2\t2"))
    assert inst.profits[0] == 0


def test_distance_tiny3(tiny3):
    assert distance(tiny3, 0, 1) == 3
    assert distance(tiny3, 0, 2) == 4
    assert distance(tiny3, 1, 2) == 5
    assert distance(tiny3, 2, 2) == 0


def test_distance_rounds_up():
    inst = make_instance([(0, 0), (1, 1)], [], 1)
    assert distance(inst, 0, 1) == math.ceil(math.sqrt(2)) == 2


def test_group_items_fig3_layout():
    cities = [0, 0, 0, 0, 1, 1, 3, 3, 3]
    groups = group_items_by_city(cities, 4)
    assert [g.tolist() for g in groups] == [[0, 1, 2, 3], [4, 5], [], [6, 7, 8]]


def test_group_items_empty_and_out_of_range():
    assert [g.tolist() for g in group_items_by_city([], 3)] == [[], [], []]
    with pytest.raises(ValueError):
        group_items_by_city([0, 3], 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.integers(0, 60), st.integers(0, 2**32 - 1))
def test_items_by_city_partition_and_round_trip(n, m, seed):
    inst = random_instance(seed, n, m)
    ids = np.concatenate(inst.items_by_city) if m else np.array([], dtype=int)
    assert sorted(ids.tolist()) == list(range(m))
    for c, idx in enumerate(inst.items_by_city):
        assert np.all(inst.item_city[idx] == c)
        assert np.all(np.diff(idx) > 0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        again = parse_instance(format_instance(inst))
    assert again == inst


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e4, 1e4), st.floats(-1e4, 1e4)), min_size=2, max_size=6))
def test_distance_symmetric_nonnegative(points):
    inst = make_instance(points, [], 1)
    for a in range(len(points)):
        assert distance(inst, a, a) == 0
        for b in range(len(points)):
            assert distance(inst, a, b) == distance(inst, b, a) >= 0


def test_non_integral_values_round_trip():
    inst = make_instance([(0.5, 1.25), (3.1, 2.7)], [(10.5, 1.3, 1)], 2.2, 0.15, 1.05, 0.37)
    assert parse_instance(format_instance(inst)) == inst
