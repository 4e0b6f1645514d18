"""Deliberately naive reference routines used to cross-check the fast paths.

Nothing here shares code with the modules it checks.
"""

from __future__ import annotations

import math

import numpy as np


def naive_evaluate(inst, tour, plan):
    """Reference objective in O(m*n): every city scans the whole item list.

    Returns ``(gain, total_time, total_profit, total_weight)``. The
    summation order (items by ascending id, legs in tour order) is the one
    the fast evaluator promises, so results are expected to match exactly.
    """
    n = len(inst.coords)
    coords = inst.coords.tolist()
    weights = inst.weights.tolist()
    profits = inst.profits.tolist()
    cities = inst.item_city.tolist()
    tour = [int(c) for c in tour]
    picked = [bool(z) for z in plan]
    vmax = inst.v_max
    coeff = inst.speed_coeff
    w = t = p = 0.0
    for pos in range(n):
        c = tour[pos]
        w_here = 0.0
        p_here = 0.0
        for k in range(len(weights)):
            if cities[k] == c and picked[k]:
                w_here += weights[k]
                p_here += profits[k]
        w = w + w_here
        p = p + p_here
        nxt = tour[(pos + 1) % n]
        dx = coords[c][0] - coords[nxt][0]
        dy = coords[c][1] - coords[nxt][1]
        d = float(math.ceil(math.sqrt(dx * dx + dy * dy)))
        t = t + d / (vmax - coeff * w)
    return p - inst.renting_ratio * t, t, p, w


def _in_circle(a, b, c, pts):
    """Standard in-circle determinant of each of ``pts`` against triangle abc.

    Positive means strictly inside the circumcircle, whatever abc's orientation.
    """
    adx, ady = a[0] - pts[:, 0], a[1] - pts[:, 1]
    bdx, bdy = b[0] - pts[:, 0], b[1] - pts[:, 1]
    cdx, cdy = c[0] - pts[:, 0], c[1] - pts[:, 1]
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return det * np.sign(orient)


def delaunay_edge_witness(points, a, b, eps=1e-9):
    """Return a third point index c whose circle through a, b, c is empty, else None.

    Brute force over every candidate c; ``eps`` (relative to the fourth power of the
    bounding-box diagonal) absorbs cocircular ties.
    """
    pts = np.asarray(points, dtype=float)
    span = np.ptp(pts, axis=0)
    tol = eps * float(span @ span) ** 2 + 1e-300
    others = np.ones(len(pts), dtype=bool)
    others[[a, b]] = False
    pa, pb = pts[a], pts[b]
    for c in np.flatnonzero(others):
        pc = pts[c]
        cross = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        if cross == 0:
            continue
        rest = others.copy()
        rest[c] = False
        if not np.any(_in_circle(pa, pb, pc, pts[rest]) > tol):
            return int(c)
    return None


def naive_two_opt_moves(tour, neighbors):
    """All (i, j) with 1 <= i < j <= n-1 whose new edge (tour[i-1], tour[j]) is a candidate."""
    n = len(tour)
    out = []
    for i in range(1, n - 1):
        for j in range(i + 1, n):
            if int(tour[j]) in set(int(x) for x in neighbors[int(tour[i - 1])]):
                out.append((i, j))
    return out
