"""Optimal stochastic dense subgraphs for the worst layer.

The pipeline solves an LP over edge variables ``x``, vertex variables ``y`` and
the worst-layer value ``t``, then turns the level sets of ``y`` into a chain of
nested subsets whose masses are ``(r_j - r_{j-1}) * |S_j|``.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .graph import MultilayerGraph, _induce
from .lp import EQ, LE, LpInstance, LpSolverError, solve_basic_optimal
from .metrics import MetricConfig, layer_values, make_metric_config, normalize_kind
from .prune import LowerBound, lower_bound_lp, useless_survivors
from .single_layer import LEVEL_TOL, LayerOptimum, layer_optima, level_sets

log = logging.getLogger(__name__)

MIN_MASS = 1e-12
RENORM_TOL = 1e-6


class PruningError(RuntimeError):
    """Preprocessing removed every vertex: the lower bound was not valid."""


@dataclass
class SolveInfo:
    lp_value: float
    is_basic: bool
    basis_verified: bool
    lp_layer_values: np.ndarray
    config: MetricConfig | None = None
    lower_bound: LowerBound | None = None
    vertices: int = 0
    edges: int = 0
    pruned_vertices: int = 0
    pruned_edges: int = 0
    preprocess_seconds: float = 0.0
    total_seconds: float = 0.0


@dataclass
class SubsetDistribution:
    """Chain-structured distribution; atoms run from the largest subset down."""

    atoms: list[tuple[frozenset, float]]
    value: float
    info: SolveInfo | None = field(default=None, repr=False)

    @property
    def support_size(self) -> int:
        return len(self.atoms)

    def is_chain(self) -> bool:
        subsets = sorted((s for s, _ in self.atoms), key=len, reverse=True)
        return all(b < a for a, b in zip(subsets, subsets[1:]))


@dataclass
class AbLpSolution:
    x: np.ndarray
    y: np.ndarray
    t: float


def build_ab_lp(g: MultilayerGraph, cfg: MetricConfig) -> LpInstance:
    """Variables ordered (x_e for e in the union edge set, y_v, t); t is free.

    Rows: one worst-layer row per layer, two endpoint rows per edge, and the
    normalization sum y = 1. An edge in several layers shares one x_e.
    """
    if g.n < 1:
        raise ValueError("graph has no vertices")
    eu, ev, per_layer = g.union_edges
    m, n = len(eu), g.n
    t_col = m + n
    lp = LpInstance(m + n + 1, objective=np.r_[np.zeros(m + n), 1.0])
    lp.lower[t_col] = -np.inf

    rows, cols, vals = [], [], []
    for i, lay in enumerate(g.layers):
        rows.append(np.full(len(lay) + 1, i))
        cols.append(np.r_[per_layer[i], t_col])
        vals.append(np.r_[-cfg.alpha[i] * lay.w, 1.0])
    lp.add_constraints(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), [LE] * g.k, cfg.beta)

    edge_ids = np.arange(m)
    erows = np.repeat(np.arange(2 * m), 2)
    ecols = np.empty(4 * m, dtype=np.int64)
    ecols[0::4], ecols[1::4] = edge_ids, m + eu
    ecols[2::4], ecols[3::4] = edge_ids, m + ev
    lp.add_constraints(erows, ecols, np.tile([1.0, -1.0], 2 * m), [LE] * (2 * m), np.zeros(2 * m))
    lp.add_constraint((np.arange(m, m + n), np.ones(n)), EQ, 1.0)
    return lp


def lp_layer_values(g: MultilayerGraph, cfg: MetricConfig, x: np.ndarray) -> np.ndarray:
    """alpha_i * sum_{e in E_i} w_i(e) x_e + beta_i for every layer."""
    _, _, per_layer = g.union_edges
    sums = np.array([lay.w @ x[idx] for lay, idx in zip(g.layers, per_layer)])
    return cfg.alpha * sums + cfg.beta


def unpack(values: np.ndarray, g: MultilayerGraph) -> AbLpSolution:
    m = g.num_edges
    return AbLpSolution(values[:m].copy(), values[m:m + g.n].copy(), float(values[-1]))


def purify_x(sol: AbLpSolution, g: MultilayerGraph, cfg: MetricConfig) -> AbLpSolution:
    """Raise every x_e to min(y_u, y_v) and recompute t as the worst layer value."""
    eu, ev, _ = g.union_edges
    x = np.minimum(sol.y[eu], sol.y[ev])
    return AbLpSolution(x, sol.y.copy(), float(lp_layer_values(g, cfg, x).min()))


def round_to_distribution(
    sol: AbLpSolution, g: MultilayerGraph, cfg: MetricConfig, tol: float = LEVEL_TOL
) -> SubsetDistribution:
    """Level-set rounding of a purified LP solution into a chain distribution."""
    levels = level_sets(sol.y, tol)
    if not levels:
        raise RuntimeError("LP solution has no positive vertex values")
    atoms = []
    prev = 0.0
    for r, members in levels:
        atoms.append((members, (r - prev) * len(members)))
        prev = r
    total = sum(p for _, p in atoms)
    if abs(total - 1.0) > RENORM_TOL:
        raise RuntimeError(f"rounded masses sum to {total!r}, beyond renormalization tolerance")
    atoms = [(s, p) for s, p in atoms if p >= MIN_MASS]
    total = sum(p for _, p in atoms)
    atoms = [(s, p / total) for s, p in atoms]
    return SubsetDistribution(atoms, float(layer_values(g, cfg, atoms).min()))


def solve_ab_density(
    g: MultilayerGraph,
    kind: str | MetricConfig = "density",
    *,
    optima: Sequence[LayerOptimum] | None = None,
    preprocess: bool = True,
    threads: int = 1,
    tol: float = 1e-9,
) -> SubsetDistribution:
    """Optimal distribution over vertex subsets for the worst-layer metric.

    ``kind`` is a metric name or a prepared :class:`MetricConfig`. Layer optima are
    computed when the metric or the preprocessing needs them. Returned atoms use
    the ids of ``g``; ``value`` is the internal objective (negated regret).
    """
    start = time.perf_counter()
    if isinstance(kind, MetricConfig):
        cfg = kind
        optima = optima or cfg.layer_optima
    else:
        kind = normalize_kind(kind)
        if optima is None and (preprocess or kind != "density"):
            optima = layer_optima(g, threads)
        cfg = make_metric_config(g, kind, optima)

    survivors = list(range(g.n))
    lb = None
    pre_start = time.perf_counter()
    if preprocess and optima is not None:
        lb = lower_bound_lp(g, cfg, optima)
        survivors = useless_survivors(g, cfg, lb.value)
        if not survivors:
            raise PruningError(f"lower bound {lb.value:.6g} removed every vertex")
    work = _induce(g, survivors) if len(survivors) < g.n else g
    pre_seconds = time.perf_counter() - pre_start

    lp = build_ab_lp(work, cfg)
    sol = solve_basic_optimal(lp, tol=tol)
    if sol.status != "optimal":
        raise LpSolverError(f"(alpha, beta) LP ended with status {sol.status}")
    pure = purify_x(unpack(sol.values, work), work, cfg)
    dist = round_to_distribution(pure, work, cfg)

    atoms = [(frozenset(survivors[v] for v in s), p) for s, p in dist.atoms]
    value = float(layer_values(g, cfg, atoms).min())
    if sol.is_basic and len(atoms) > g.k:
        log.warning("support size %d exceeds k=%d despite a basic LP solution", len(atoms), g.k)
    info = SolveInfo(
        lp_value=sol.objective_value,
        is_basic=sol.is_basic,
        basis_verified=sol.basis_verified,
        lp_layer_values=lp_layer_values(work, cfg, pure.x),
        config=cfg,
        lower_bound=lb,
        vertices=g.n,
        edges=g.num_edges,
        pruned_vertices=work.n,
        pruned_edges=work.num_edges,
        preprocess_seconds=pre_seconds,
        total_seconds=time.perf_counter() - start,
    )
    return SubsetDistribution(atoms, value, info)
