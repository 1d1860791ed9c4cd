"""Brute-force ground truth for tiny graphs.

Subsets are enumerated as integer bitmasks in increasing order. The distribution
oracle solves the direct LP over all 2^n - 1 nonempty subsets, which shares no
structure with the edge/vertex LP used by the main solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import MultilayerGraph
from .lp import EQ, LE, LpInstance, LpSolverError, solve_basic_optimal
from .metrics import MetricConfig, layer_values
from .single_layer import EmptyLayerError, LayerOptimum

MAX_DENSEST_N = 20
MAX_DISTRIBUTION_N = 12


class OracleSizeError(ValueError):
    pass


@dataclass
class OracleResult:
    value: float
    atoms: list[tuple[frozenset, float]]
    method: str


def _subset_table(g: MultilayerGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Masks 1..2^n-1, their sizes, and a (k, 2^n-1) table of induced weights."""
    masks = np.arange(1, 1 << g.n, dtype=np.int64)
    sizes = np.zeros(len(masks), dtype=np.int64)
    for v in range(g.n):
        sizes += (masks >> v) & 1
    weights = np.zeros((g.k, len(masks)))
    for i, lay in enumerate(g.layers):
        for a, b, wt in lay.edges:
            weights[i] += wt * (((masks >> a) & (masks >> b)) & 1)
    return masks, sizes, weights


def _members(mask: int) -> frozenset:
    return frozenset(v for v in range(mask.bit_length()) if mask >> v & 1)


def enumerate_densest(g: MultilayerGraph, layer: int) -> LayerOptimum:
    if g.n > MAX_DENSEST_N:
        raise OracleSizeError(f"exhaustive densest subgraph limited to n <= {MAX_DENSEST_N}")
    if len(g.layers[layer]) == 0:
        raise EmptyLayerError(f"layer {layer} has no edges")
    masks, sizes, weights = _subset_table(g)
    dens = weights[layer] / sizes
    best = int(np.argmax(dens))  # first maximum = lowest bitmask
    return LayerOptimum(layer, _members(int(masks[best])), float(dens[best]))


def oracle_ab_density(g: MultilayerGraph, cfg: MetricConfig) -> OracleResult:
    """max t s.t. t <= alpha_i sum_S p_S w_i(S)/|S| + beta_i, sum p = 1, p >= 0."""
    if g.n > MAX_DISTRIBUTION_N:
        raise OracleSizeError(f"distribution oracle limited to n <= {MAX_DISTRIBUTION_N}")
    masks, sizes, weights = _subset_table(g)
    dens = weights / sizes
    num = len(masks)
    lp = LpInstance(num + 1, objective=np.r_[np.zeros(num), 1.0])
    lp.lower[num] = -np.inf
    for i in range(g.k):
        nz = np.flatnonzero(dens[i])
        lp.add_constraint((np.r_[nz, num], np.r_[-cfg.alpha[i] * dens[i, nz], 1.0]), LE, cfg.beta[i])
    lp.add_constraint((np.arange(num), np.ones(num)), EQ, 1.0)
    sol = solve_basic_optimal(lp, basis_check_limit=0)
    if sol.status != "optimal":
        raise LpSolverError(f"oracle LP ended with status {sol.status}")
    p = sol.values[:num]
    atoms = [(_members(int(masks[j])), float(p[j])) for j in np.flatnonzero(p > 1e-12)]
    return OracleResult(sol.objective_value, atoms, f"direct LP over {num} subsets")


def best_deterministic(g: MultilayerGraph, cfg: MetricConfig) -> tuple[frozenset, float]:
    """Single subset maximizing the worst-layer value (point-mass distributions)."""
    if g.n > MAX_DENSEST_N:
        raise OracleSizeError(f"exhaustive search limited to n <= {MAX_DENSEST_N}")
    masks, sizes, weights = _subset_table(g)
    vals = (cfg.alpha[:, None] * weights / sizes + cfg.beta[:, None]).min(axis=0)
    best = int(np.argmax(vals))
    return _members(int(masks[best])), float(vals[best])


def reevaluate(g: MultilayerGraph, cfg: MetricConfig, result: OracleResult) -> float:
    return float(layer_values(g, cfg, result.atoms).min())
