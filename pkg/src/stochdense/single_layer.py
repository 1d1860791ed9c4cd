"""Densest subgraph on one layer: greedy peeling, exact LP, Balalau pruning."""

from __future__ import annotations

import heapq
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import MultilayerGraph, _induce, density
from .lp import EQ, LE, LpInstance, LpSolverError, solve_basic_optimal

LEVEL_TOL = 1e-7


class EmptyLayerError(ValueError):
    """The layer has no edges, so no subset has positive density."""


@dataclass(frozen=True)
class LayerOptimum:
    layer: int
    subset: frozenset
    opt_density: float


def _require_edges(g: MultilayerGraph, layer: int):
    if not 0 <= layer < g.k:
        raise IndexError(f"layer {layer} out of range for k={g.k}")
    if len(g.layers[layer]) == 0:
        raise EmptyLayerError(f"layer {layer} has no edges")


def peel(g: MultilayerGraph, layers, score) -> tuple[frozenset, float]:
    """Greedy peeling over ``layers`` by summed weighted degree.

    Repeatedly removes a vertex of minimum summed degree (lowest id on ties) and
    returns the first remaining set maximizing ``score(weights, size)``, where
    ``weights`` holds the current induced weight of every peeled layer.
    """
    adj = [g.layers[i].adjacency for i in layers]
    deg = np.zeros(g.n)
    for i in layers:
        deg += g.layers[i].degrees
    weights = np.array([g.layers[i].total_weight for i in layers])
    alive = np.ones(g.n, dtype=bool)
    heap = [(d, v) for v, d in enumerate(deg.tolist())]
    heapq.heapify(heap)

    size = g.n
    best_score, best_removed = score(weights, size), 0
    order = []
    while size > 1:
        d, v = heapq.heappop(heap)
        if not alive[v] or d != deg[v]:
            continue
        alive[v] = False
        order.append(v)
        size -= 1
        touched = set()
        for li, nbrs in enumerate(adj):
            for u, wt in nbrs[v]:
                if alive[u]:
                    deg[u] -= wt
                    weights[li] -= wt
                    touched.add(u)
        for u in touched:
            heapq.heappush(heap, (deg[u], u))
        current = score(weights, size)
        if current > best_score:
            best_score, best_removed = current, len(order)
    removed = set(order[:best_removed])
    return frozenset(v for v in range(g.n) if v not in removed), float(best_score)


def greedy_peeling(g: MultilayerGraph, layer: int) -> tuple[frozenset, float]:
    """Charikar's peeling: a 2-approximate densest subgraph in O(m + n log n)."""
    _require_edges(g, layer)
    return peel(g, [layer], lambda w, size: w[0] / size)


def _balalau_survivors(g: MultilayerGraph, layer: int, lower_bound: float) -> list[int]:
    lay = g.layers[layer]
    deg = lay.degrees.copy()
    alive = np.ones(g.n, dtype=bool)
    stack = [v for v in range(g.n) if deg[v] < lower_bound]
    queued = np.zeros(g.n, dtype=bool)
    queued[stack] = True
    while stack:
        v = stack.pop()
        alive[v] = False
        for u, wt in lay.adjacency[v]:
            if alive[u]:
                deg[u] -= wt
                if not queued[u] and deg[u] < lower_bound:
                    queued[u] = True
                    stack.append(u)
    return np.flatnonzero(alive).tolist()


def balalau_prune(g: MultilayerGraph, layer: int, lower_bound: float) -> MultilayerGraph:
    """Delete vertices whose degree in ``layer`` is strictly below ``lower_bound``.

    Degrees are maintained incrementally as vertices disappear. Every densest
    subgraph of the layer survives when ``lower_bound`` does not exceed the optimum.
    The result is induced on the survivors in all layers.
    """
    return _induce(g, _balalau_survivors(g, layer, lower_bound))


def charikar_lp(g: MultilayerGraph, layer: int) -> tuple[LpInstance, int]:
    """max sum w_e x_e  s.t.  x_e <= y_u, x_e <= y_v, sum y = 1, x, y >= 0."""
    lay = g.layers[layer]
    m = len(lay)
    lp = LpInstance(m + g.n, objective=np.concatenate([lay.w, np.zeros(g.n)]))
    edge_ids = np.arange(m)
    rows = np.repeat(np.arange(2 * m), 2)
    cols = np.empty(4 * m, dtype=np.int64)
    vals = np.tile([1.0, -1.0], 2 * m)
    cols[0::4], cols[1::4] = edge_ids, m + lay.u
    cols[2::4], cols[3::4] = edge_ids, m + lay.v
    lp.add_constraints(rows, cols, vals, [LE] * (2 * m), np.zeros(2 * m))
    lp.add_constraint((np.arange(m, m + g.n), np.ones(g.n)), EQ, 1.0)
    return lp, m


def level_sets(y: np.ndarray, tol: float = LEVEL_TOL) -> list[tuple[float, frozenset]]:
    """Distinct positive levels r_1 < ... < r_l of ``y`` with S_j = {v : y_v >= r_j}.

    Values within ``tol`` of each other form one level (chained), and values at or
    below ``tol`` count as zero. Each level is represented by its mean value.
    """
    order = np.argsort(y, kind="stable")
    vals = y[order]
    groups: list[list[int]] = []
    for pos in np.flatnonzero(vals > tol):
        if groups and vals[pos] - vals[groups[-1][-1]] <= tol:
            groups[-1].append(pos)
        else:
            groups.append([pos])
    levels = []
    for grp in groups:
        members = frozenset(order[grp[0]:].tolist())
        levels.append((float(vals[grp].mean()), members))
    return levels


def densest_exact(g: MultilayerGraph, layer: int, prune: bool = True) -> LayerOptimum:
    """Exact densest subgraph of one layer via Charikar's LP.

    With ``prune`` the graph is first shrunk by :func:`balalau_prune` seeded with
    the greedy peeling value. Among the level sets of the LP solution the largest
    one attaining the optimum is returned, in ids of ``g``.
    """
    _require_edges(g, layer)
    survivors = list(range(g.n))
    if prune:
        _, greedy_value = greedy_peeling(g, layer)
        # greedy value is a realized density, so it never exceeds the optimum;
        # the margin only absorbs float summation order.
        survivors = _balalau_survivors(g, layer, greedy_value * (1 - 1e-12))
    work = _induce(g, survivors) if len(survivors) < g.n else g
    lp, m = charikar_lp(work, layer)
    sol = solve_basic_optimal(lp)
    if sol.status != "optimal":
        raise LpSolverError(f"densest subgraph LP ended with status {sol.status}")
    y = sol.values[m:]
    candidates = [(density(work, layer, s), s) for _, s in level_sets(y)]
    best = max(d for d, _ in candidates)
    subset = max((s for d, s in candidates if d >= best - 1e-9 * max(1.0, best)), key=len)
    subset = frozenset(survivors[v] for v in subset)
    return LayerOptimum(layer, subset, density(g, layer, subset))


def layer_optima(g: MultilayerGraph, threads: int = 1) -> list[LayerOptimum]:
    """Densest subgraph of every layer; empty layers get an empty optimum of density 0."""

    def one(i):
        if len(g.layers[i]) == 0:
            return LayerOptimum(i, frozenset(), 0.0)
        return densest_exact(g, i)

    if threads > 1 and g.k > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(g.k)))
    return [one(i) for i in range(g.k)]
