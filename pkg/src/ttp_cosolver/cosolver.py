"""Cosolver2B: alternate 2-OPT tour search and bit-flip packing search over
the exact TTP objective. Also hosts the RLS / (1+1)-EA baselines and the
exhaustive oracle used to check them on tiny instances."""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .construction import ScoreVariant, best_initial_plan, expired, initial_tour
from .errors import InfeasiblePlan, InstanceTooLarge
from .evaluation import commit, delta_bitflip, delta_two_opt, evaluate_full
from .neighborhoods import (DEFAULT_KNN_K, delaunay_candidates, enumerate_bitflips,
                            enumerate_two_opt, knn_candidates)

log = logging.getLogger(__name__)

FIRST_FIT = "first"
BEST_FIT = "best"
ORACLE_MAX_CITIES = 9
ORACLE_MAX_ITEMS = 16


@dataclass
class SolverConfig:
    fit: str = BEST_FIT
    time_budget: float = 600.0
    seed: int = 0
    variants: tuple = tuple(ScoreVariant)
    candidates: str = "delaunay"
    knn_k: int = DEFAULT_KNN_K
    max_steps: int | None = None
    external_tour: np.ndarray | None = None

    def __post_init__(self):
        if not self.time_budget > 0:
            raise ValueError("time_budget must be positive")
        if self.fit not in (FIRST_FIT, BEST_FIT):
            raise ValueError(f"fit must be {FIRST_FIT!r} or {BEST_FIT!r}, got {self.fit!r}")
        if self.candidates not in ("delaunay", "knn"):
            raise ValueError(f"unknown candidate source {self.candidates!r}")
        if self.knn_k < 1:
            raise ValueError("knn_k must be at least 1")
        if self.max_steps is not None and self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")


@dataclass
class TraceEntry:
    round: int
    phase: str
    gain: float
    moves: int


@dataclass
class SearchLog:
    """Counters shared by the local searches of one run."""

    evaluations: int = 0
    history: list = field(default_factory=list)
    timed_out: bool = False

    def committed(self, state):
        self.history.append(state.gain)


@dataclass
class SolveResult:
    """Final solution of one run. ``tour`` and ``plan`` are 0-based arrays."""

    tour: np.ndarray
    plan: np.ndarray
    gain: float
    runtime: float
    rounds: int = 0
    trace: list = field(default_factory=list)
    exit_reason: str = "converged"
    evaluations: int = 0
    history: list = field(default_factory=list)
    initial_gain: float | None = None

    def tour_ids(self):
        return [int(c) + 1 for c in self.tour]

    def plan_bits(self):
        return [int(z) for z in self.plan]


def build_candidates(inst, config):
    if config.candidates == "knn":
        return knn_candidates(inst, config.knn_k)
    return delaunay_candidates(inst, config.knn_k)


def tskp_optimize(inst, state, cand, fit=BEST_FIT, deadline=None, search_log=None):
    """Hill-climb the tour with candidate 2-OPT reversals at a fixed plan.

    Minimising travel cost and maximising gain coincide here since the
    plan's profit is fixed. Mutates ``state``; returns the number of
    committed moves.
    """
    search_log = search_log if search_log is not None else SearchLog()
    moves = 0
    while True:
        best = None
        for i, j in enumerate_two_opt(state.tour, cand, state.pos):
            if expired(deadline):
                search_log.timed_out = True
                return moves
            pv = delta_two_opt(inst, state, i, j)
            search_log.evaluations += 1
            if pv.gain > state.gain and (best is None or pv.gain > best.gain):
                best = pv
                if fit == FIRST_FIT:
                    break
        if best is None:
            return moves
        commit(state, best)
        search_log.committed(state)
        moves += 1


def krp_optimize(inst, state, fit=BEST_FIT, deadline=None, search_log=None):
    """Hill-climb the picking plan with feasible single bit-flips at a fixed tour."""
    search_log = search_log if search_log is not None else SearchLog()
    moves = 0
    while True:
        best = None
        for k in enumerate_bitflips(inst, state):
            if expired(deadline):
                search_log.timed_out = True
                return moves
            pv = delta_bitflip(inst, state, k)
            search_log.evaluations += 1
            if pv.feasible and pv.gain > state.gain and (best is None or pv.gain > best.gain):
                best = pv
                if fit == FIRST_FIT:
                    break
        if best is None:
            return moves
        commit(state, best)
        search_log.committed(state)
        moves += 1


def cosolver2b(inst, config=None, cand=None):
    """Run Cosolver2B on ``inst``.

    Starts from :func:`initial_tour` and :func:`best_initial_plan`, then
    alternates a TSKP phase (tour) and a KRP phase (plan) until a round
    yields no strict gain improvement or the time budget runs out.
    """
    config = config or SolverConfig()
    start = time.perf_counter()
    deadline = start + config.time_budget
    cand = cand if cand is not None else build_candidates(inst, config)
    tour = initial_tour(inst, cand, config.external_tour, deadline)
    plan = best_initial_plan(inst, tour, config.variants, deadline)
    state = evaluate_full(inst, tour, plan)
    search_log = SearchLog(evaluations=1)
    search_log.committed(state)
    initial_gain = state.gain
    trace = []
    rounds = 0
    while not expired(deadline):
        rounds += 1
        before = state.gain
        moves = tskp_optimize(inst, state, cand, config.fit, deadline, search_log)
        trace.append(TraceEntry(rounds, "tskp", state.gain, moves))
        if search_log.timed_out:
            break
        moves = krp_optimize(inst, state, config.fit, deadline, search_log)
        trace.append(TraceEntry(rounds, "krp", state.gain, moves))
        if search_log.timed_out or not state.gain > before:
            break
    timed_out = search_log.timed_out or expired(deadline)
    log.debug("cosolver2b %s: gain %.6f after %d rounds", inst.name, state.gain, rounds)
    return SolveResult(state.tour.copy(), state.plan.copy(), state.gain,
                       time.perf_counter() - start, rounds, trace,
                       "timeout" if timed_out else "converged",
                       search_log.evaluations, search_log.history, initial_gain)


def _baseline_start(inst, config, deadline):
    cand = build_candidates(inst, config)
    tour = initial_tour(inst, cand, config.external_tour, deadline)
    return evaluate_full(inst, tour, np.zeros(inst.m, dtype=bool))


def _steps(config, deadline):
    step = 0
    while (config.max_steps is None or step < config.max_steps) and not expired(deadline):
        yield step
        step += 1


def rls_baseline(inst, config=None):
    """Random local search on the plan over a fixed tour: flip one random item,
    keep it iff feasible and strictly better."""
    config = config or SolverConfig()
    start = time.perf_counter()
    deadline = start + config.time_budget
    state = _baseline_start(inst, config, deadline)
    search_log = SearchLog(evaluations=1)
    search_log.committed(state)
    initial_gain = state.gain
    rng = np.random.default_rng(config.seed)
    steps = 0
    if inst.m:
        for steps in _steps(config, deadline):
            pv = delta_bitflip(inst, state, int(rng.integers(inst.m)))
            search_log.evaluations += 1
            if pv.feasible and pv.gain > state.gain:
                commit(state, pv)
                search_log.committed(state)
    return SolveResult(state.tour.copy(), state.plan.copy(), state.gain,
                       time.perf_counter() - start, 0, [],
                       "timeout" if expired(deadline) else "converged",
                       search_log.evaluations, search_log.history, initial_gain)


def ea_baseline(inst, config=None):
    """(1+1)-EA on the plan over a fixed tour: each bit flips with probability
    1/m, infeasible offspring are discarded, ties replace the parent."""
    config = config or SolverConfig()
    start = time.perf_counter()
    deadline = start + config.time_budget
    state = _baseline_start(inst, config, deadline)
    search_log = SearchLog(evaluations=1)
    search_log.committed(state)
    initial_gain = state.gain
    rng = np.random.default_rng(config.seed)
    m = inst.m
    if m:
        for _ in _steps(config, deadline):
            flips = np.flatnonzero(rng.random(m) < 1.0 / m)
            if len(flips) == 0:
                continue
            if len(flips) == 1:
                pv = delta_bitflip(inst, state, int(flips[0]))
                search_log.evaluations += 1
                if pv.feasible and pv.gain >= state.gain:
                    commit(state, pv)
                    search_log.committed(state)
                continue
            child = state.plan.copy()
            child[flips] = ~child[flips]
            search_log.evaluations += 1
            try:
                offspring = evaluate_full(inst, state.tour, child)
            except InfeasiblePlan:
                continue
            if offspring.gain >= state.gain:
                offspring.version = state.version + 1
                state = offspring
                search_log.committed(state)
    return SolveResult(state.tour.copy(), state.plan.copy(), state.gain,
                       time.perf_counter() - start, 0, [],
                       "timeout" if expired(deadline) else "converged",
                       search_log.evaluations, search_log.history, initial_gain)


def _all_plans(m):
    idx = np.arange(2 ** m)
    shifts = np.arange(m - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(bool)


def _city_loads(inst, plans, values):
    """Per plan and city, the picked ``values`` summed in ascending item order."""
    out = np.zeros((len(plans), inst.n))
    for c, idx in enumerate(inst.items_by_city):
        s = np.zeros(len(plans))
        for k in idx.tolist():
            s = s + np.where(plans[:, k], values[k], 0.0)
        out[:, c] = s
    return out


def brute_force_oracle(inst, chunk_elems=1 << 21):
    """Exhaustive optimum over all tours starting at city 0 and all plans.

    Ties go to the lexicographically smallest tour, then plan. Evaluation
    is batched over plans and tours but performs the same floating-point
    operations, in the same order, as :func:`evaluate_full`.
    """
    if inst.n > ORACLE_MAX_CITIES or inst.m > ORACLE_MAX_ITEMS:
        raise InstanceTooLarge(f"oracle handles n <= {ORACLE_MAX_CITIES} and "
                               f"m <= {ORACLE_MAX_ITEMS}; got n={inst.n}, m={inst.m}")
    start = time.perf_counter()
    n, m = inst.n, inst.m
    plans = _all_plans(m)
    wl = _city_loads(inst, plans, inst.weights)
    pl = _city_loads(inst, plans, inst.profits)
    tours = np.array([(0, *rest) for rest in itertools.permutations(range(1, n))],
                     dtype=np.int64).reshape(-1, n)
    per_chunk = max(1, chunk_elems // (len(plans) * n))
    best_gain = -np.inf
    best = None
    for lo in range(0, len(tours), per_chunk):
        chunk = tours[lo:lo + per_chunk]
        legs = np.stack([inst.leg_lengths(t) for t in chunk])[:, None, :]
        w_acc = np.add.accumulate(wl[:, chunk].transpose(1, 0, 2), axis=2)
        with np.errstate(divide="ignore", invalid="ignore"):
            # overweight plans may stall the thief; they are masked below
            t_acc = np.add.accumulate(legs / (inst.v_max - inst.speed_coeff * w_acc), axis=2)
        p_acc = np.add.accumulate(pl[:, chunk].transpose(1, 0, 2), axis=2)
        gains = p_acc[:, :, -1] - inst.renting_ratio * t_acc[:, :, -1]
        gains[w_acc[:, :, -1] > inst.capacity] = -np.inf
        flat = int(np.argmax(gains))
        t_i, p_i = divmod(flat, len(plans))
        if gains[t_i, p_i] > best_gain:
            best_gain = gains[t_i, p_i]
            best = (chunk[t_i], plans[p_i])
    state = evaluate_full(inst, best[0], best[1])
    if state.gain != best_gain:
        raise AssertionError(f"batched oracle gain {best_gain!r} disagrees with "
                             f"full evaluation {state.gain!r}")
    return SolveResult(state.tour.copy(), state.plan.copy(), state.gain,
                       time.perf_counter() - start, 0, [], "converged",
                       len(tours) * len(plans), [state.gain], None)
