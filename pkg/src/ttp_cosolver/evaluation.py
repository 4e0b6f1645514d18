"""Exact TTP objective with suffix-only re-evaluation of bit-flip and 2-OPT moves.

The thief picks the items of a city before leaving it, so the leg leaving
tour position ``p`` is travelled at ``velocity(w_acc[p])``. Per position
``p`` the state keeps

* ``w_reg[p]`` / ``p_reg[p]``: weight / profit picked at position ``p``,
* ``t_reg[p]``: time of the leg leaving position ``p`` (the last position
  holds the return leg to the start),
* ``w_acc``, ``t_acc``, ``p_acc``: running sums of the registers, inclusive
  of ``p``.

Full evaluation and move previews share one kernel (:func:`_suffix`), and a
preview restarts it from the first position a move can affect with the
stored prefix values. Previews therefore reproduce full evaluation of the
mutated solution bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePlan, StalePreview

BITFLIP = "bitflip"
TWO_OPT = "two_opt"


def velocity(inst, w):
    """Thief speed when carrying weight ``w``."""
    return inst.v_max - inst.speed_coeff * w


def _accumulate(prev, regs):
    """Running sum of ``regs`` continuing from ``prev``, strictly left to right."""
    buf = np.empty(len(regs) + 1)
    buf[0] = prev
    buf[1:] = regs
    return np.add.accumulate(buf)[1:]


def _suffix(inst, w_prev, t_prev, p_prev, w_reg, p_reg, legs):
    w_acc = _accumulate(w_prev, w_reg)
    with np.errstate(divide="ignore", invalid="ignore"):
        # only overweight previews can stall; they are reported infeasible
        t_reg = legs / (inst.v_max - inst.speed_coeff * w_acc)
    t_acc = _accumulate(t_prev, t_reg)
    p_acc = _accumulate(p_prev, p_reg)
    return w_acc, t_reg, t_acc, p_acc


def _city_load(inst, plan, c):
    """Weight and profit picked at city ``c``, summed in ascending item order."""
    w = 0.0
    p = 0.0
    idx = inst.items_by_city[c]
    if len(idx):
        for k in idx[plan[idx]].tolist():
            w += float(inst.weights[k])
            p += float(inst.profits[k])
    return w, p


@dataclass
class EvalState:
    """Objective value of a (tour, plan) pair plus the per-position bookkeeping.

    The state owns copies of the tour and plan it describes; :func:`commit`
    mutates all of them together.
    """

    tour: np.ndarray
    pos: np.ndarray
    plan: np.ndarray
    legs: np.ndarray
    w_reg: np.ndarray
    w_acc: np.ndarray
    t_reg: np.ndarray
    t_acc: np.ndarray
    p_reg: np.ndarray
    p_acc: np.ndarray
    total_time: float
    total_profit: float
    total_weight: float
    gain: float
    version: int = 0

    def copy(self):
        return EvalState(self.tour.copy(), self.pos.copy(), self.plan.copy(), self.legs.copy(),
                         self.w_reg.copy(), self.w_acc.copy(), self.t_reg.copy(),
                         self.t_acc.copy(), self.p_reg.copy(), self.p_acc.copy(),
                         self.total_time, self.total_profit, self.total_weight,
                         self.gain, self.version)


@dataclass
class DeltaPreview:
    """Outcome of a move, computed without touching the state.

    ``start`` is the first tour position whose bookkeeping differs; the
    array fields hold the new values for positions ``start..n-1``.
    Infeasible previews carry ``feasible=False`` and no gain.
    """

    kind: str
    move: tuple
    version: int
    feasible: bool
    gain: float | None
    total_weight: float
    start: int
    overflow: float = 0.0
    legs: np.ndarray | None = None
    w_reg: np.ndarray | None = None
    w_acc: np.ndarray | None = None
    t_reg: np.ndarray | None = None
    t_acc: np.ndarray | None = None
    p_reg: np.ndarray | None = None
    p_acc: np.ndarray | None = None


def _check_tour(tour, n):
    tour = np.asarray(tour, dtype=np.int64)
    if tour.shape != (n,) or not np.array_equal(np.sort(tour), np.arange(n)):
        raise ValueError(f"tour must be a permutation of the {n} cities")
    if tour[0] != 0:
        raise ValueError("tour must start at the first city")
    return tour


def _check_plan(plan, m):
    plan = np.asarray(plan)
    if plan.shape != (m,):
        raise ValueError(f"plan must have one entry per item ({m})")
    if plan.dtype != bool:
        if not np.all((plan == 0) | (plan == 1)):
            raise ValueError("plan entries must be 0 or 1")
        plan = plan.astype(bool)
    return plan.copy()


def evaluate_full(inst, tour, plan):
    """Evaluate a solution from scratch in O(n + m).

    Args:
        inst: the instance.
        tour: 0-based city permutation starting with city 0.
        plan: length-m 0/1 picking plan.

    Raises:
        InfeasiblePlan: when the picked weight exceeds the capacity.
    """
    tour = _check_tour(tour, inst.n)
    plan = _check_plan(plan, inst.m)
    n = inst.n
    w_reg = np.empty(n)
    p_reg = np.empty(n)
    for p, c in enumerate(tour.tolist()):
        w_reg[p], p_reg[p] = _city_load(inst, plan, c)
    legs = inst.leg_lengths(tour)
    w_acc, t_reg, t_acc, p_acc = _suffix(inst, 0.0, 0.0, 0.0, w_reg, p_reg, legs)
    if w_acc[-1] > inst.capacity:
        raise InfeasiblePlan(float(w_acc[-1] - inst.capacity))
    pos = np.empty(n, dtype=np.int64)
    pos[tour] = np.arange(n)
    total_time = float(t_acc[-1])
    total_profit = float(p_acc[-1])
    return EvalState(tour, pos, plan, legs, w_reg, w_acc, t_reg, t_acc, p_reg, p_acc,
                     total_time, total_profit, float(w_acc[-1]),
                     total_profit - inst.renting_ratio * total_time)


def travel_cost(state, inst):
    """Renting cost of the travel time; the quantity the tour optimiser minimises."""
    return inst.renting_ratio * state.total_time


def _prefix(state, start):
    if start == 0:
        return 0.0, 0.0, 0.0
    return (float(state.w_acc[start - 1]), float(state.t_acc[start - 1]),
            float(state.p_acc[start - 1]))


def _preview(inst, state, kind, move, start, legs, w_reg, p_reg):
    w_prev, t_prev, p_prev = _prefix(state, start)
    w_acc = _accumulate(w_prev, w_reg)
    if w_acc[-1] > inst.capacity:
        return DeltaPreview(kind, move, state.version, False, None, float(w_acc[-1]), start,
                            overflow=float(w_acc[-1] - inst.capacity))
    w_acc, t_reg, t_acc, p_acc = _suffix(inst, w_prev, t_prev, p_prev, w_reg, p_reg, legs)
    gain = float(p_acc[-1]) - inst.renting_ratio * float(t_acc[-1])
    return DeltaPreview(kind, move, state.version, True, gain, float(w_acc[-1]), start,
                        legs=legs, w_reg=w_reg, w_acc=w_acc, t_reg=t_reg, t_acc=t_acc,
                        p_reg=p_reg, p_acc=p_acc)


def delta_bitflip(inst, state, item):
    """Preview toggling ``item`` in the plan.

    Only the suffix starting at the tour position of the item's city is
    recomputed. Toggling an item on past capacity yields an infeasible
    preview (``feasible=False``, ``gain=None``).
    """
    c = int(inst.item_city[item])
    p = int(state.pos[c])
    plan = state.plan
    plan[item] = not plan[item]
    try:
        w_c, p_c = _city_load(inst, plan, c)
    finally:
        plan[item] = not plan[item]
    w_reg = state.w_reg[p:].copy()
    p_reg = state.p_reg[p:].copy()
    w_reg[0] = w_c
    p_reg[0] = p_c
    return _preview(inst, state, BITFLIP, (int(item),), p, state.legs[p:].copy(), w_reg, p_reg)


def delta_two_opt(inst, state, i, j):
    """Preview reversing tour positions ``i..j`` (``1 <= i <= j <= n-1``).

    Items travel with their cities, so the per-position registers of the
    segment are permuted, and everything from the edge entering position
    ``i`` onward is recomputed.
    """
    n = inst.n
    if not 1 <= i <= j <= n - 1:
        raise ValueError(f"invalid 2-OPT positions ({i}, {j}) for n={n}")
    start = i - 1
    tour = state.tour
    legs = state.legs[start:].copy()
    if j > i:
        # entries i..j-1 of the old legs, reversed, become the segment's internal legs
        legs[1:j - start] = state.legs[i:j][::-1]
        legs[0] = inst.dist(int(tour[i - 1]), int(tour[j]))
        legs[j - start] = inst.dist(int(tour[i]), int(tour[(j + 1) % n]))
    w_reg = state.w_reg[start:].copy()
    p_reg = state.p_reg[start:].copy()
    w_reg[1:j - start + 1] = state.w_reg[i:j + 1][::-1]
    p_reg[1:j - start + 1] = state.p_reg[i:j + 1][::-1]
    return _preview(inst, state, TWO_OPT, (int(i), int(j)), start, legs, w_reg, p_reg)


def commit(state, preview):
    """Apply a previewed move to ``state`` in place and return it.

    Raises:
        StalePreview: the state was modified after the preview was taken.
        InfeasiblePlan: the preview is infeasible.
    """
    if preview.version != state.version:
        raise StalePreview(f"preview taken at version {preview.version}, "
                           f"state is at version {state.version}")
    if not preview.feasible:
        raise InfeasiblePlan(preview.overflow)
    s = preview.start
    if preview.kind == BITFLIP:
        (item,) = preview.move
        state.plan[item] = not state.plan[item]
    else:
        i, j = preview.move
        seg = state.tour[i:j + 1][::-1].copy()
        state.tour[i:j + 1] = seg
        state.pos[seg] = np.arange(i, j + 1)
    state.legs[s:] = preview.legs
    state.w_reg[s:] = preview.w_reg
    state.w_acc[s:] = preview.w_acc
    state.t_reg[s:] = preview.t_reg
    state.t_acc[s:] = preview.t_acc
    state.p_reg[s:] = preview.p_reg
    state.p_acc[s:] = preview.p_acc
    state.total_weight = float(state.w_acc[-1])
    state.total_time = float(state.t_acc[-1])
    state.total_profit = float(state.p_acc[-1])
    state.gain = preview.gain
    state.version += 1
    return state
