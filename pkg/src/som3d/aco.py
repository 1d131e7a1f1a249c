"""Open-path measurement tours: ant colony optimization plus two baselines."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

MAX_BRUTE_FORCE = 10


@dataclass(frozen=True)
class WaypointSet:
    points: np.ndarray
    start: tuple[float, float, float]

    def __init__(self, points, start):
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        if len(pts) == 0:
            raise ValueError("waypoint set is empty")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "start", tuple(map(float, start)))

    def __len__(self) -> int:
        return len(self.points)

    def nodes(self) -> np.ndarray:
        """Start followed by the waypoints."""
        return np.vstack([np.asarray(self.start)[None], self.points])

    def distances(self) -> np.ndarray:
        p = self.nodes()
        return np.sqrt(((p[:, None, :] - p[None, :, :]) ** 2).sum(-1))


@dataclass(frozen=True)
class AcoParams:
    n_ants: int = 20
    alpha_pher: float = 1.0
    beta_heur: float = 3.0
    rho: float = 0.1
    deposit: float = 1.0
    iterations: int = 200
    seed: int = 0
    # ants choose among this many nearest unvisited candidates on large instances
    candidates: int = 16

    def __post_init__(self):
        if self.n_ants < 1 or self.iterations < 1 or self.candidates < 1:
            raise ValueError("n_ants, iterations and candidates must be positive")
        if self.alpha_pher <= 0 or self.beta_heur <= 0 or self.deposit <= 0:
            raise ValueError("alpha_pher, beta_heur and deposit must be positive")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    length: float
    start: tuple[float, float, float]
    end: tuple[float, float, float]


def _check_order(order: Sequence[int], n: int) -> tuple[int, ...]:
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order is not a permutation of range({n})")
    return order


def tour_length(order: Sequence[int], ws: WaypointSet) -> float:
    """Euclidean length from the start through the waypoints in ``order``."""
    order = _check_order(order, len(ws))
    path = np.vstack([np.asarray(ws.start)[None], ws.points[list(order)]])
    return float(np.sqrt((np.diff(path, axis=0) ** 2).sum(-1)).sum())


def _make_tour(order: Sequence[int], ws: WaypointSet) -> Tour:
    order = _check_order(order, len(ws))
    return Tour(order, tour_length(order, ws), ws.start, tuple(ws.points[order[-1]]))


def nearest_neighbor_tour(ws: WaypointSet) -> Tour:
    """Greedy tour: always fly to the closest unvisited waypoint (lowest index on ties)."""
    d = ws.distances()
    n = len(ws)
    unvisited = np.ones(n + 1, dtype=bool)
    unvisited[0] = False
    cur = 0
    order = []
    for _ in range(n):
        row = np.where(unvisited, d[cur], np.inf)
        cur = int(np.argmin(row))
        unvisited[cur] = False
        order.append(cur - 1)
    return _make_tour(order, ws)


def brute_force_tour(ws: WaypointSet) -> Tour:
    """Exact shortest open path by enumerating every visiting order."""
    n = len(ws)
    if n > MAX_BRUTE_FORCE:
        raise ValueError(f"brute force limited to {MAX_BRUTE_FORCE} waypoints, got {n}")
    if n == 1:
        return _make_tour([0], ws)
    d = ws.distances()
    best_len, best = math.inf, None
    for first in range(n):
        rest = [i for i in range(n) if i != first]
        perms = np.array(list(itertools.permutations(rest)), dtype=np.intp).reshape(-1, n - 1)
        seq = np.hstack([np.full((len(perms), 1), first), perms]) + 1
        lengths = d[0, seq[:, 0]] + d[seq[:, :-1], seq[:, 1:]].sum(axis=1)
        k = int(np.argmin(lengths))
        # strict comparison keeps the lexicographically first optimum
        if lengths[k] < best_len - 1e-12 * max(best_len, 1.0) or best is None:
            best_len, best = float(lengths[k]), seq[k] - 1
    return _make_tour(best, ws)


@njit(cache=True)
def _construct(weight, cand, dist, u):
    """Build one path per row of ``u`` (node 0 is the start).

    Each step scans the current node's candidate list and picks an unvisited
    candidate with probability proportional to its ``weight`` entry (aligned
    with ``cand``) by inverting the cumulative weight at ``u[ant, step]``.
    When every candidate is visited the ant moves to the nearest unvisited
    node instead.
    """
    ants, n = u.shape
    k = cand.shape[1]
    paths = np.empty((ants, n), dtype=np.int64)
    lengths = np.zeros(ants)
    for a in range(ants):
        visited = np.zeros(n + 1, dtype=np.bool_)
        visited[0] = True
        cur = 0
        for step in range(n):
            total = 0.0
            for s in range(k):
                c = cand[cur, s]
                if not visited[c]:
                    total += weight[cur, s]
            nxt = -1
            if total > 0.0:
                target = u[a, step] * total
                acc = 0.0
                for s in range(k):
                    c = cand[cur, s]
                    if not visited[c]:
                        acc += weight[cur, s]
                        nxt = c
                        if acc > target:
                            break
            else:
                near = np.inf
                for c in range(1, n + 1):
                    if not visited[c] and dist[cur, c] < near:
                        near = dist[cur, c]
                        nxt = c
            lengths[a] += dist[cur, nxt]
            visited[nxt] = True
            paths[a, step] = nxt
            cur = nxt
    return paths, lengths


@njit(cache=True)
def _two_opt(path, dist, cand):
    """Improve an open path in place by segment reversals; returns its length.

    ``path`` holds waypoint nodes after the fixed start node 0. Only moves that
    create an edge from a node to one of its candidates closer than its
    current successor are tried, as in neighbor-list 2-opt.
    """
    n = path.shape[0]
    p = np.empty(n + 1, dtype=np.int64)
    p[0] = 0
    p[1:] = path
    pos = np.empty(n + 1, dtype=np.int64)
    for i in range(n + 1):
        pos[p[i]] = i
    improved = True
    while improved:
        improved = False
        for i in range(n):
            a = p[i]
            b = p[i + 1]
            for s in range(cand.shape[1]):
                c = cand[a, s]
                if dist[a, c] >= dist[a, b]:
                    break
                j = pos[c]
                lo = min(i, j)
                hi = max(i, j)
                if hi - lo < 2:
                    continue
                removed = dist[p[lo], p[lo + 1]]
                added = dist[p[lo], p[hi]]
                if hi < n:
                    removed += dist[p[hi], p[hi + 1]]
                    added += dist[p[lo + 1], p[hi + 1]]
                if added < removed - 1e-10 * removed:
                    # reverse p[lo+1 .. hi]
                    x, y = lo + 1, hi
                    while x < y:
                        p[x], p[y] = p[y], p[x]
                        pos[p[x]] = x
                        pos[p[y]] = y
                        x += 1
                        y -= 1
                    improved = True
                    break
    path[:] = p[1:]
    total = 0.0
    for i in range(n):
        total += dist[p[i], p[i + 1]]
    return total


def plan_tour(ws: WaypointSet, params: AcoParams | None = None) -> Tour:
    """Shortest open path from ``ws.start`` through every waypoint, by ant colony optimization.

    Each iteration draws one uniform per ant and step from a single seeded
    generator, so the result does not depend on how the ants are scheduled.
    The iteration-best path is shortened by 2-opt; then pheromone evaporates
    by ``rho`` and that path receives ``deposit / length`` on each of its
    edges. Returns the best path seen.
    """
    params = params or AcoParams()
    n = len(ws)
    if n == 1:
        return _make_tour([0], ws)
    rng = np.random.default_rng(params.seed)
    d = ws.distances()
    ants = params.n_ants
    # candidate lists: k nearest waypoints of each node (the start is never a target)
    k = n if n <= params.candidates else params.candidates
    cand = np.argsort(np.where(np.eye(n + 1, dtype=bool), np.inf, d)[:, 1:], axis=1, kind="stable")
    cand = np.ascontiguousarray(cand[:, :k] + 1)
    rows = np.arange(n + 1)[:, None]
    dc = d[rows, cand]
    scale = d[d > 0].mean() if np.any(d > 0) else 1.0
    with np.errstate(divide="ignore"):
        heur = np.where(dc > 0, scale / dc, 1e12) ** params.beta_heur
    nn_len = nearest_neighbor_tour(ws).length
    # Pheromone is stored divided by the running evaporation factor ``decay``.
    # Selection probabilities are invariant to a global scale, so evaporation
    # only touches the scalar; deposits are divided by it.
    tau = np.full_like(d, 1.0 / (n * nn_len) if nn_len > 0 else 1.0)
    decay = 1.0
    best_len, best = math.inf, None
    for _ in range(params.iterations):
        weight = tau[rows, cand] ** params.alpha_pher * heur
        paths, lengths = _construct(weight, cand, d, rng.random((ants, n)))
        k_best = int(np.argmin(lengths))
        lengths[k_best] = _two_opt(paths[k_best], d, cand)
        if lengths[k_best] < best_len:
            best_len, best = float(lengths[k_best]), paths[k_best].copy()
        decay *= 1.0 - params.rho
        walk = np.concatenate([[0], paths[k_best]])
        gain = params.deposit / lengths[k_best] if lengths[k_best] > 0 else params.deposit
        tau[walk[:-1], walk[1:]] += gain / decay
        tau[walk[1:], walk[:-1]] = tau[walk[:-1], walk[1:]]
        if decay < 1e-30:
            tau *= decay
            decay = 1.0
    return _make_tour(best - 1, ws)
