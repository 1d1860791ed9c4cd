"""Safe preprocessing: a lower bound from mixing layer optima, then vertex removal."""

from __future__ import annotations

import heapq
import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .graph import MultilayerGraph, _induce, density
from .lp import EQ, LE, LpInstance, LpSolverError, solve_basic_optimal
from .metrics import MetricConfig
from .single_layer import LayerOptimum

log = logging.getLogger(__name__)

# Removal uses lb - PRUNE_MARGIN * max(1, |lb|) so float noise in lb can never
# push a vertex whose key equals the optimum below the threshold.
PRUNE_MARGIN = 1e-9


@dataclass(frozen=True)
class LowerBound:
    value: float
    mixture: np.ndarray


def cross_densities(g: MultilayerGraph, optima: Sequence[LayerOptimum]) -> np.ndarray:
    """``D[i, j]`` = density of layer i on the densest subgraph of layer j."""
    return np.array([[density(g, i, o.subset) for o in optima] for i in range(g.k)])


def lower_bound_lp(g: MultilayerGraph, cfg: MetricConfig, optima: Sequence[LayerOptimum]) -> LowerBound:
    """Best mixture of the per-layer densest subgraphs, an LP with k+1 variables.

    Empty optima (layers without edges) are not valid subsets and get q_j = 0.
    """
    k = g.k
    if len(optima) != k:
        raise ValueError("need one layer optimum per layer")
    d = cross_densities(g, optima)
    usable = np.array([bool(o.subset) for o in optima])
    if not usable.any():
        # every layer is empty: any distribution scores min_i beta_i
        return LowerBound(float(np.min(cfg.beta)), np.full(k, 1.0 / k))
    lp = LpInstance(k + 1, objective=np.r_[np.zeros(k), 1.0])
    lp.lower[k] = -np.inf
    lp.upper[:k] = np.where(usable, np.inf, 0.0)
    for i in range(k):
        coeffs = {j: -cfg.alpha[i] * d[i, j] for j in range(k) if d[i, j] != 0}
        coeffs[k] = 1.0
        lp.add_constraint(coeffs, LE, cfg.beta[i])
    lp.add_constraint((np.arange(k), np.ones(k)), EQ, 1.0)
    sol = solve_basic_optimal(lp)
    if sol.status != "optimal":
        raise LpSolverError(f"lower-bound LP ended with status {sol.status}")
    q = np.clip(sol.values[:k], 0.0, None)
    q /= q.sum()
    value = float(np.min(cfg.alpha * (d @ q) + cfg.beta))
    return LowerBound(value, q)


def useless_survivors(g: MultilayerGraph, cfg: MetricConfig, lb: float) -> list[int]:
    """Vertices kept by repeatedly deleting the argmin of max_i [alpha_i d_i + beta_i]
    while that key is strictly below ``lb`` (lowest id on ties)."""
    threshold = lb - PRUNE_MARGIN * max(1.0, abs(lb))
    deg = np.array([lay.degrees for lay in g.layers])  # k x n
    alpha = cfg.alpha[:, None]
    beta = cfg.beta[:, None]
    key = (alpha * deg + beta).max(axis=0)
    heap = list(zip(key.tolist(), range(g.n)))
    heapq.heapify(heap)
    alive = np.ones(g.n, dtype=bool)
    adj = [lay.adjacency for lay in g.layers]
    while heap:
        kv, v = heapq.heappop(heap)
        if not alive[v] or kv != key[v]:
            continue
        if kv >= threshold:
            break
        alive[v] = False
        touched = set()
        for i, nbrs in enumerate(adj):
            for u, wt in nbrs[v]:
                if alive[u]:
                    deg[i, u] -= wt
                    touched.add(u)
        for u in touched:
            key[u] = float(np.max(cfg.alpha * deg[:, u] + cfg.beta))
            heapq.heappush(heap, (key[u], u))
    return np.flatnonzero(alive).tolist()


def remove_useless(g: MultilayerGraph, cfg: MetricConfig, lb: float) -> MultilayerGraph:
    """Induced graph on the vertices surviving the removal rule.

    Returns a graph with ``n == 0`` if everything is removed, which means ``lb``
    exceeded the true optimum.
    """
    survivors = useless_survivors(g, cfg, lb)
    if not survivors:
        log.warning("pruning removed every vertex; lower bound %.6g exceeds the optimum", lb)
    return _induce(g, survivors)
