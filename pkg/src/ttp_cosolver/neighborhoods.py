"""Candidate graphs for 2-OPT and move enumeration for the local searches."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_KNN_K = 8


@dataclass(frozen=True)
class CandidateGraph:
    """Symmetric sparse adjacency over 0-based city indices."""

    neighbors: tuple
    source: str = "delaunay"

    @classmethod
    def from_edges(cls, n, edges, source):
        adj = [set() for _ in range(n)]
        for a, b in edges:
            if a != b:
                adj[a].add(b)
                adj[b].add(a)
        return cls(tuple(np.array(sorted(s), dtype=np.int64) for s in adj), source)

    @classmethod
    def complete(cls, n):
        return cls.from_edges(n, ((a, b) for a in range(n) for b in range(a + 1, n)), "complete")

    @property
    def n(self):
        return len(self.neighbors)

    def edges(self):
        """Undirected edges as sorted ``(a, b)`` pairs with ``a < b``."""
        return sorted((a, int(b)) for a, nb in enumerate(self.neighbors) for b in nb if a < b)

    def has_edge(self, a, b):
        nb = self.neighbors[a]
        k = np.searchsorted(nb, b)
        return k < len(nb) and nb[k] == b


def _points(cities):
    if hasattr(cities, "coords"):
        return np.asarray(cities.coords, dtype=float)
    cities = list(cities)
    if cities and hasattr(cities[0], "x"):
        return np.array([(c.x, c.y) for c in cities], dtype=float)
    return np.asarray(cities, dtype=float).reshape(-1, 2)


def knn_candidates(cities, k=DEFAULT_KNN_K):
    """Symmetric closure of the k-nearest-neighbour relation (Euclidean, ties to lower id)."""
    pts = _points(cities)
    n = len(pts)
    k = min(k, n - 1)
    edges = []
    if k < 1:
        return CandidateGraph.from_edges(n, edges, "knn")
    ids = np.arange(n)
    for a in range(n):
        d = pts - pts[a]
        d2 = d[:, 0] * d[:, 0] + d[:, 1] * d[:, 1]
        d2[a] = np.inf
        order = np.lexsort((ids, d2))[:k]
        edges.extend((a, int(b)) for b in order)
    return CandidateGraph.from_edges(n, edges, "knn")


class _Degenerate(Exception):
    pass


def _circumcircle(p, q, r):
    ax, ay = p
    bx, by = q
    cx, cy = r
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        raise _Degenerate("zero-area triangle")
    a2 = ax * ax + ay * ay
    b2 = bx * bx + by * by
    c2 = cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    return ux, uy, float(np.hypot(ax - ux, ay - uy))


def _bowyer_watson(pts):
    """Delaunay edges of ``pts`` by incremental insertion into a super-triangle.

    Raises _Degenerate when the construction becomes inconsistent.
    """
    n = len(pts)
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    diag = float(np.hypot(*(hi - lo)))
    eps = 1e-10 * diag
    mid = (lo + hi) / 2.0
    big = 10000.0 * max(diag, 1.0)
    # super-triangle vertices take indices n, n+1, n+2
    allpts = np.vstack([pts, [[mid[0] - big, mid[1] - big],
                              [mid[0] + big, mid[1] - big],
                              [mid[0], mid[1] + big]]])

    cap = 2 * n + 8
    tri = np.empty((cap, 3), dtype=np.int64)
    cx = np.empty(cap)
    cy = np.empty(cap)
    rad = np.empty(cap)
    alive = np.zeros(cap, dtype=bool)
    count = 0

    def add(a, b, c):
        nonlocal tri, cx, cy, rad, alive, cap, count
        if count == cap:
            cap *= 2
            tri = np.resize(tri, (cap, 3))
            cx, cy, rad = np.resize(cx, cap), np.resize(cy, cap), np.resize(rad, cap)
            grown = np.zeros(cap, dtype=bool)
            grown[:count] = alive[:count]
            alive = grown
        tri[count] = (a, b, c)
        cx[count], cy[count], rad[count] = _circumcircle(allpts[a], allpts[b], allpts[c])
        alive[count] = True
        count += 1

    add(n, n + 1, n + 2)
    for v in np.lexsort((pts[:, 1], pts[:, 0])).tolist():
        x, y = pts[v]
        live = np.flatnonzero(alive[:count])
        dist = np.hypot(cx[live] - x, cy[live] - y)
        bad = live[dist < rad[live] - eps]
        if len(bad) == 0:
            raise _Degenerate(f"point {v} lies in no circumcircle")
        boundary = {}
        for t in bad.tolist():
            a, b, c = tri[t].tolist()
            for e in ((a, b), (b, c), (c, a)):
                key = (min(e), max(e))
                boundary[key] = None if key in boundary else e
        alive[bad] = False
        edges = [e for e in boundary.values() if e is not None]
        if len(edges) != len(bad) + 2:
            raise _Degenerate(f"cavity of point {v} is not a simple polygon")
        for a, b in edges:
            add(a, b, v)

    keep = np.flatnonzero(alive[:count])
    tris = tri[keep]
    tris = tris[np.all(tris < n, axis=1)]
    out = set()
    for a, b, c in tris.tolist():
        out.update(((min(a, b), max(a, b)), (min(b, c), max(b, c)), (min(a, c), max(a, c))))
    return out


def delaunay_candidates(cities, fallback_k=DEFAULT_KNN_K):
    """Delaunay-triangulation edges of the city points as a 2-OPT candidate graph.

    Collinear or duplicate points, or any inconsistency found while
    triangulating, produce the k-nearest-neighbour graph instead.
    """
    pts = _points(cities)
    n = len(pts)
    if n < 3:
        return knn_candidates(pts, fallback_k)
    if len(np.unique(pts, axis=0)) < n:
        log.info("duplicate city coordinates; using %d-NN candidates", fallback_k)
        return knn_candidates(pts, fallback_k)
    rel = pts - pts[0]
    far = int(np.argmax(np.hypot(rel[:, 0], rel[:, 1])))
    cross = rel[far, 0] * rel[:, 1] - rel[far, 1] * rel[:, 0]
    span = float(np.hypot(*np.ptp(pts, axis=0)))
    if np.max(np.abs(cross)) <= 1e-12 * span * span:
        log.info("collinear cities; using %d-NN candidates", fallback_k)
        return knn_candidates(pts, fallback_k)
    try:
        edges = _bowyer_watson(pts)
    except _Degenerate as exc:
        log.warning("Delaunay construction failed (%s); using %d-NN candidates", exc, fallback_k)
        return knn_candidates(pts, fallback_k)
    graph = CandidateGraph.from_edges(n, edges, "delaunay")
    if any(len(nb) == 0 for nb in graph.neighbors) or len(edges) > 3 * n - 6:
        log.warning("Delaunay graph inconsistent; using %d-NN candidates", fallback_k)
        return knn_candidates(pts, fallback_k)
    return graph


def enumerate_two_opt(tour, cand, pos=None):
    """Yield candidate 2-OPT reversals ``(i, j)`` in ascending order.

    A reversal of positions ``i..j`` (``1 <= i < j <= n-1``) is admitted
    when its new edge ``(tour[i-1], tour[j])`` is a candidate edge.
    """
    tour = np.asarray(tour)
    n = len(tour)
    if pos is None:
        pos = np.empty(n, dtype=np.int64)
        pos[tour] = np.arange(n)
    for i in range(1, n - 1):
        js = pos[cand.neighbors[int(tour[i - 1])]]
        for j in np.sort(js[js > i]).tolist():
            yield i, j


def enumerate_bitflips(inst, state):
    """Yield item indices in ascending order, skipping flips-on that overflow the knapsack."""
    load = state.total_weight
    cap = inst.capacity
    plan = state.plan
    for k, w in enumerate(inst.weights.tolist()):
        if plan[k] or load + w <= cap:
            yield k
