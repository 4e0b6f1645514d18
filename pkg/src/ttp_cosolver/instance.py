"""TTP instances: the benchmark file format, validation, and the items-per-city index.

Cities and items carry 1-based ids in files and reports. Everywhere in the
Python API they are addressed by 0-based position (city ``c`` is
``inst.coords[c]``, item ``k`` is ``inst.weights[k]``).
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InstanceFormatError


@dataclass(frozen=True)
class City:
    index: int
    x: float
    y: float


@dataclass(frozen=True)
class Item:
    index: int
    profit: float
    weight: float
    city: int


def group_items_by_city(item_city, n):
    """Class item indices by the city holding them.

    Args:
        item_city: 0-based city index of every item.
        n: number of cities.

    Returns:
        A tuple of length ``n``; entry ``c`` is an int array of the items
        located at city ``c``, in ascending item order.
    """
    item_city = np.asarray(item_city, dtype=np.int64)
    if item_city.size and (item_city.min() < 0 or item_city.max() >= n):
        bad = int(np.flatnonzero((item_city < 0) | (item_city >= n))[0])
        raise ValueError(f"item {bad + 1} refers to city {item_city[bad] + 1}, outside [1, {n}]")
    order = np.argsort(item_city, kind="stable")
    bounds = np.searchsorted(item_city[order], np.arange(n + 1))
    return tuple(order[bounds[c]:bounds[c + 1]] for c in range(n))


class Instance:
    """Immutable TTP problem data.

    Speeds follow ``v(w) = v_max - speed_coeff * w`` with
    ``speed_coeff = (v_max - v_min) / capacity``.
    """

    def __init__(self, name, coords, profits, weights, item_city, capacity,
                 v_min, v_max, renting_ratio, knapsack_type=""):
        coords = np.array(coords, dtype=float).reshape(-1, 2)
        profits = np.array(profits, dtype=float).reshape(-1)
        weights = np.array(weights, dtype=float).reshape(-1)
        item_city = np.array(item_city, dtype=np.int64).reshape(-1)
        if len(coords) < 1:
            raise ValueError("an instance needs at least one city")
        if not np.all(np.isfinite(coords)):
            raise ValueError("city coordinates must be finite")
        if not (len(profits) == len(weights) == len(item_city)):
            raise ValueError("profits, weights and item cities differ in length")
        if np.any(profits < 0) or not np.all(np.isfinite(profits)):
            raise ValueError("item profits must be finite and nonnegative")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("item weights must be finite and positive")
        if not capacity >= 0:
            raise ValueError("capacity must be nonnegative")
        if not v_max > v_min > 0:
            raise ValueError("speeds must satisfy v_max > v_min > 0")
        if not renting_ratio >= 0:
            raise ValueError("renting ratio must be nonnegative")

        self.name = str(name)
        self.knapsack_type = str(knapsack_type)
        self.capacity = float(capacity)
        self.v_min = float(v_min)
        self.v_max = float(v_max)
        self.renting_ratio = float(renting_ratio)
        # A zero-capacity knapsack never carries weight; keep the coefficient finite.
        self.speed_coeff = (self.v_max - self.v_min) / self.capacity if self.capacity > 0 else 0.0
        self.coords = coords
        self.profits = profits
        self.weights = weights
        self.item_city = item_city
        self.items_by_city = group_items_by_city(item_city, len(coords))
        for arr in (coords, profits, weights, item_city, *self.items_by_city):
            arr.flags.writeable = False

    @property
    def n(self):
        return len(self.coords)

    @property
    def m(self):
        return len(self.profits)

    @property
    def cities(self):
        return [City(c + 1, float(x), float(y)) for c, (x, y) in enumerate(self.coords)]

    @property
    def items(self):
        return [Item(k + 1, float(p), float(w), int(c) + 1)
                for k, (p, w, c) in enumerate(zip(self.profits, self.weights, self.item_city))]

    def dist(self, a, b):
        """CEIL_2D distance between cities ``a`` and ``b`` (0-based)."""
        dx = self.coords[a, 0] - self.coords[b, 0]
        dy = self.coords[a, 1] - self.coords[b, 1]
        return float(math.ceil(math.sqrt(dx * dx + dy * dy)))

    def dist_to_all(self, a):
        """CEIL_2D distances from city ``a`` to every city, as a float array."""
        d = self.coords - self.coords[a]
        return np.ceil(np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]))

    def leg_lengths(self, order):
        """Distances of the closed tour ``order``: entry p is the leg leaving position p."""
        order = np.asarray(order)
        a = self.coords[order]
        d = a - np.roll(a, -1, axis=0)
        return np.ceil(np.sqrt(d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]))

    def tour_length(self, order):
        return float(self.leg_lengths(order).sum())

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.name == other.name
                and self.knapsack_type == other.knapsack_type
                and self.capacity == other.capacity
                and self.v_min == other.v_min
                and self.v_max == other.v_max
                and self.renting_ratio == other.renting_ratio
                and np.array_equal(self.coords, other.coords)
                and np.array_equal(self.profits, other.profits)
                and np.array_equal(self.weights, other.weights)
                and np.array_equal(self.item_city, other.item_city))

    __hash__ = None

    def __repr__(self):
        return (f"Instance(name={self.name!r}, n={self.n}, m={self.m}, "
                f"capacity={self.capacity:g}, R={self.renting_ratio:g})")


def distance(inst, a, b):
    """Ceiling of the Euclidean distance between cities ``a`` and ``b`` (0-based)."""
    return inst.dist(a, b)


_HEADER_KEYS = {
    "PROBLEM NAME": "name",
    "KNAPSACK DATA TYPE": "knapsack_type",
    "DIMENSION": "n",
    "NUMBER OF ITEMS": "m",
    "CAPACITY OF KNAPSACK": "capacity",
    "MIN SPEED": "v_min",
    "MAX SPEED": "v_max",
    "RENTING RATIO": "renting_ratio",
    "EDGE_WEIGHT_TYPE": "edge_weight_type",
}
_INT_KEYS = {"n", "m"}
_FLOAT_KEYS = {"capacity", "v_min", "v_max", "renting_ratio"}


def _number(token, lineno, what, kind=float):
    try:
        value = kind(token)
    except ValueError:
        raise InstanceFormatError(f"malformed {what}: {token!r}", lineno) from None
    if kind is float and not math.isfinite(value):
        raise InstanceFormatError(f"non-finite {what}: {token!r}", lineno)
    return value


def _read_section(lines, start, count, width, what):
    """Collect ``count`` data rows following line index ``start``; blank lines are skipped."""
    rows = []
    i = start
    while len(rows) < count:
        i += 1
        if i >= len(lines):
            raise InstanceFormatError(
                f"{what} section ends after {len(rows)} of {count} declared rows", i)
        text = lines[i].strip()
        if not text:
            continue
        parts = text.split()
        if len(parts) != width:
            raise InstanceFormatError(
                f"{what} row needs {width} fields, got {len(parts)}", i + 1)
        rows.append((i + 1, parts))
    return rows, i


def parse_instance(text):
    """Parse the contents of a TTP benchmark file into a validated :class:`Instance`."""
    lines = text.splitlines()
    header = {}
    coords = profits = weights = item_city = None
    i = 0
    while i < len(lines):
        raw = lines[i].strip()
        lineno = i + 1
        upper = raw.upper()
        if not raw:
            pass
        elif upper.startswith("NODE_COORD_SECTION"):
            n = header.get("n")
            if n is None:
                raise InstanceFormatError("NODE_COORD_SECTION before DIMENSION", lineno)
            rows, i = _read_section(lines, i, n, 3, "node coordinate")
            coords = np.full((n, 2), np.nan)
            for row_line, (idx, x, y) in rows:
                c = _number(idx, row_line, "city index", int)
                if not 1 <= c <= n:
                    raise InstanceFormatError(f"city index {c} outside [1, {n}]", row_line)
                if not np.isnan(coords[c - 1, 0]):
                    raise InstanceFormatError(f"duplicate city index {c}", row_line)
                coords[c - 1] = (_number(x, row_line, "x coordinate"),
                                 _number(y, row_line, "y coordinate"))
        elif upper.startswith("ITEMS SECTION"):
            n, m = header.get("n"), header.get("m")
            if n is None or m is None:
                raise InstanceFormatError("ITEMS SECTION before DIMENSION / NUMBER OF ITEMS", lineno)
            rows, i = _read_section(lines, i, m, 4, "item")
            profits = np.zeros(m)
            weights = np.zeros(m)
            item_city = np.full(m, -1, dtype=np.int64)
            for row_line, (idx, p, w, c) in rows:
                k = _number(idx, row_line, "item index", int)
                if not 1 <= k <= m:
                    raise InstanceFormatError(f"item index {k} outside [1, {m}]", row_line)
                if item_city[k - 1] >= 0:
                    raise InstanceFormatError(f"duplicate item index {k}", row_line)
                profits[k - 1] = _number(p, row_line, "profit")
                weights[k - 1] = _number(w, row_line, "weight")
                city = _number(c, row_line, "item city", int)
                if not 1 <= city <= n:
                    raise InstanceFormatError(
                        f"item {k} assigned to city {city}, outside [1, {n}]", row_line)
                if profits[k - 1] < 0:
                    raise InstanceFormatError(f"item {k} has negative profit", row_line)
                if weights[k - 1] <= 0:
                    raise InstanceFormatError(f"item {k} has non-positive weight", row_line)
                item_city[k - 1] = city - 1
        elif ":" in raw:
            key, _, value = raw.partition(":")
            key = re.sub(r"\s+", " ", key.strip().upper())
            value = value.strip()
            field = _HEADER_KEYS.get(key)
            if field is None:
                warnings.warn(f"line {lineno}: ignoring unknown header key {key!r}", stacklevel=2)
            elif field in _INT_KEYS:
                header[field] = _number(value, lineno, key, int)
                if header[field] < 0 or (field == "n" and header[field] < 1):
                    raise InstanceFormatError(f"invalid {key}: {value!r}", lineno)
            elif field in _FLOAT_KEYS:
                header[field] = _number(value, lineno, key)
                header[f"{field}_line"] = lineno
            elif field == "edge_weight_type":
                if value.upper() != "CEIL_2D":
                    raise InstanceFormatError(f"unsupported EDGE_WEIGHT_TYPE {value!r}", lineno)
            else:
                header[field] = value
        else:
            raise InstanceFormatError(f"unrecognised line {raw[:40]!r}", lineno)
        i += 1

    for field, key in (("n", "DIMENSION"), ("m", "NUMBER OF ITEMS"),
                       ("capacity", "CAPACITY OF KNAPSACK"), ("v_min", "MIN SPEED"),
                       ("v_max", "MAX SPEED"), ("renting_ratio", "RENTING RATIO")):
        if field not in header:
            raise InstanceFormatError(f"missing header {key}")
    if coords is None:
        raise InstanceFormatError("missing NODE_COORD_SECTION")
    if profits is None:
        if header["m"] > 0:
            raise InstanceFormatError("missing ITEMS SECTION")
        profits, weights, item_city = np.zeros(0), np.zeros(0), np.zeros(0, dtype=np.int64)
    if header["capacity"] <= 0:
        raise InstanceFormatError("capacity must be positive", header["capacity_line"])
    if header["v_min"] <= 0:
        raise InstanceFormatError("MIN SPEED must be positive", header["v_min_line"])
    if header["v_max"] <= header["v_min"]:
        raise InstanceFormatError("MAX SPEED must exceed MIN SPEED", header["v_max_line"])
    if header["renting_ratio"] < 0:
        raise InstanceFormatError("RENTING RATIO must be nonnegative", header["renting_ratio_line"])

    return Instance(header.get("name", ""), coords, profits, weights, item_city,
                    header["capacity"], header["v_min"], header["v_max"],
                    header["renting_ratio"], header.get("knapsack_type", ""))


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _fmt(x):
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2 ** 53 else repr(x)


def format_instance(inst):
    """Serialise an instance in the benchmark file format (exact round trip)."""
    out = [
        f"PROBLEM NAME: {inst.name}",
        f"KNAPSACK DATA TYPE: {inst.knapsack_type}",
        f"DIMENSION: {inst.n}",
        f"NUMBER OF ITEMS: {inst.m}",
        f"CAPACITY OF KNAPSACK: {_fmt(inst.capacity)}",
        f"MIN SPEED: {_fmt(inst.v_min)}",
        f"MAX SPEED: {_fmt(inst.v_max)}",
        f"RENTING RATIO: {_fmt(inst.renting_ratio)}",
        "EDGE_WEIGHT_TYPE: CEIL_2D",
        "NODE_COORD_SECTION\t(INDEX, X, Y):",
    ]
    out += [f"{c + 1}\t{_fmt(x)}\t{_fmt(y)}" for c, (x, y) in enumerate(inst.coords)]
    out.append("ITEMS SECTION\t(INDEX, PROFIT, WEIGHT, ASSIGNED NODE NUMBER):")
    out += [f"{k + 1}\t{_fmt(p)}\t{_fmt(w)}\t{c + 1}"
            for k, (p, w, c) in enumerate(zip(inst.profits, inst.weights, inst.item_city))]
    return "\n".join(out) + "\n"


def random_instance(rng, n, m, capacity_fraction=0.5, coord_range=100,
                    v_min=0.1, v_max=1.0, renting_ratio=None, name=None):
    """Draw a small random instance, mainly for property tests and verification.

    Coordinates, profits and weights are integers. Items are spread uniformly
    over cities 2..n (city 1 only holds items when ``n == 1``). The capacity
    is ``capacity_fraction`` of the total item weight. When ``renting_ratio``
    is None it is drawn so that the renting cost of an unloaded tour is
    comparable to the total profit on offer.
    """
    rng = np.random.default_rng(rng)
    coords = rng.integers(0, coord_range + 1, size=(n, 2)).astype(float)
    profits = rng.integers(1, 101, size=m).astype(float)
    weights = rng.integers(1, 101, size=m).astype(float)
    if n > 1:
        item_city = rng.integers(1, n, size=m)
    else:
        item_city = np.zeros(m, dtype=np.int64)
    capacity = max(float(np.floor(capacity_fraction * weights.sum())), 1.0)
    if renting_ratio is None:
        perimeter = 4.0 * coord_range
        renting_ratio = float(np.round(rng.uniform(0.05, 0.5) * max(profits.sum(), 1.0)
                                       * v_max / perimeter, 3))
    if name is None:
        name = f"random_n{n}_m{m}"
    return Instance(name, coords, profits, weights, item_city, capacity,
                    v_min, v_max, renting_ratio, "random")
