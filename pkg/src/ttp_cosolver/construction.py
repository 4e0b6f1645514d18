"""Initial solutions: a 2-OPT-polished nearest-neighbour tour and the
insertion & elimination heuristic for the picking plan."""

from __future__ import annotations

import enum
import time

import numpy as np

from .errors import ExternalTourInvalid
from .evaluation import commit, delta_bitflip, evaluate_full


class ScoreVariant(enum.Enum):
    """Item orderings used by the insertion pass."""

    PROFIT_ONLY = "profit"
    PROFIT_PER_WEIGHT = "profit/weight"
    PROFIT_PER_WEIGHT_DISTANCE = "profit/(weight*distance)"


def expired(deadline):
    return deadline is not None and time.perf_counter() > deadline


def canonical_tour(order, n):
    """Validate a 0-based city permutation and rotate it to start at city 0."""
    try:
        order = np.asarray(order, dtype=np.int64).reshape(-1)
    except (TypeError, ValueError):
        raise ExternalTourInvalid("tour entries must be integers") from None
    if len(order) != n:
        raise ExternalTourInvalid(f"tour lists {len(order)} cities, instance has {n}")
    if not np.array_equal(np.sort(order), np.arange(n)):
        raise ExternalTourInvalid("tour is not a permutation of the cities")
    return np.roll(order, -int(np.flatnonzero(order == 0)[0]))


def parse_tour(text, n):
    """Read a tour file: either one line of 1-based city ids, or a TSPLIB
    ``TOUR_SECTION`` terminated by -1. Returns a canonical 0-based tour."""
    lines = text.splitlines()
    upper = [ln.strip().upper() for ln in lines]
    if "TOUR_SECTION" in upper:
        ids = []
        for ln in lines[upper.index("TOUR_SECTION") + 1:]:
            for tok in ln.split():
                if tok == "-1" or tok.upper() == "EOF":
                    break
                ids.append(tok)
            else:
                continue
            break
    else:
        ids = text.split()
    try:
        ids = [int(tok) for tok in ids]
    except ValueError:
        raise ExternalTourInvalid("tour file contains a non-integer city id") from None
    return canonical_tour(np.array(ids, dtype=np.int64) - 1, n)


def nearest_neighbor_tour(inst):
    """Greedy tour from city 0; ties go to the lower city index."""
    n = inst.n
    tour = np.empty(n, dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    cur = 0
    for p in range(n):
        tour[p] = cur
        seen[cur] = True
        if p == n - 1:
            break
        d = inst.dist_to_all(cur)
        d[seen] = np.inf
        cur = int(np.argmin(d))
    return tour


def two_opt_length_descent(inst, tour, cand, deadline=None):
    """First-improvement candidate-list 2-OPT on tour length only.

    Sweeps positions i ascending and, for each, candidate partners of
    ``tour[i-1]`` by ascending position; sweeps repeat until one makes no
    strictly improving reversal.
    """
    tour = np.array(tour, dtype=np.int64)
    n = len(tour)
    pos = np.empty(n, dtype=np.int64)
    pos[tour] = np.arange(n)
    dist = inst.dist
    improved = True
    while improved and not expired(deadline):
        improved = False
        for i in range(1, n - 1):
            a = int(tour[i - 1])
            b = int(tour[i])
            d_ab = dist(a, b)
            js = pos[cand.neighbors[a]]
            for j in np.sort(js[js > i]).tolist():
                c = int(tour[j])
                e = int(tour[(j + 1) % n])
                if dist(a, c) + dist(b, e) < d_ab + dist(c, e):
                    seg = tour[i:j + 1][::-1].copy()
                    tour[i:j + 1] = seg
                    pos[seg] = np.arange(i, j + 1)
                    improved = True
                    break
    return tour


def initial_tour(inst, cand, external=None, deadline=None):
    """Starting tour: ``external`` (rotated to city 0) if given, otherwise a
    nearest-neighbour tour improved by candidate-list 2-OPT on length."""
    if external is not None:
        return canonical_tour(external, inst.n)
    return two_opt_length_descent(inst, nearest_neighbor_tour(inst), cand, deadline)


def remaining_distance(inst, tour):
    """Per city: tour distance still to travel from that city back to city 0."""
    legs = inst.leg_lengths(tour)
    rem = np.cumsum(legs[::-1])[::-1]
    out = np.empty(inst.n)
    out[np.asarray(tour)] = rem
    return out


def item_scores(inst, tour, variant):
    p = inst.profits
    w = inst.weights
    if variant is ScoreVariant.PROFIT_ONLY:
        return p.copy()
    if variant is ScoreVariant.PROFIT_PER_WEIGHT:
        return p / w
    d = remaining_distance(inst, tour)[inst.item_city]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = p / (w * d)
    # nothing left to travel: the item costs no slowdown
    s[d == 0] = np.where(p[d == 0] > 0, np.inf, 0.0)
    return s


def insert_items(inst, state, order, deadline=None):
    """Try items in ``order``; keep each that fits and strictly raises the gain."""
    cap = inst.capacity
    for k in order:
        if expired(deadline):
            break
        if state.plan[k] or state.total_weight + inst.weights[k] > cap:
            continue
        pv = delta_bitflip(inst, state, k)
        if pv.feasible and pv.gain > state.gain:
            commit(state, pv)
    return state


def eliminate_items(inst, state, deadline=None):
    """Drop picked items (ascending index) while dropping one strictly raises the gain."""
    removed = True
    while removed and not expired(deadline):
        removed = False
        for k in np.flatnonzero(state.plan).tolist():
            pv = delta_bitflip(inst, state, k)
            if pv.gain > state.gain:
                commit(state, pv)
                removed = True
    return state


def insertion_pass(inst, tour, variant, deadline=None):
    state = evaluate_full(inst, tour, np.zeros(inst.m, dtype=bool))
    scores = item_scores(inst, state.tour, variant)
    order = np.lexsort((np.arange(inst.m), -scores))
    return insert_items(inst, state, order.tolist(), deadline).plan.copy()


def elimination_pass(inst, tour, plan, deadline=None):
    state = evaluate_full(inst, tour, plan)
    return eliminate_items(inst, state, deadline).plan.copy()


def best_initial_plan(inst, tour, variants=tuple(ScoreVariant), deadline=None):
    """Insertion then elimination for each score variant; the highest exact gain wins.

    Ties keep the earlier variant.
    """
    best_plan = None
    best_gain = None
    for variant in variants:
        state = evaluate_full(inst, tour, np.zeros(inst.m, dtype=bool))
        order = np.lexsort((np.arange(inst.m), -item_scores(inst, state.tour, variant)))
        insert_items(inst, state, order.tolist(), deadline)
        eliminate_items(inst, state, deadline)
        if best_gain is None or state.gain > best_gain:
            best_plan, best_gain = state.plan.copy(), state.gain
    if best_plan is None:
        best_plan = np.zeros(inst.m, dtype=bool)
    return best_plan
