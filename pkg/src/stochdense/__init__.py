"""Exact stochastic dense subgraph discovery in multilayer networks."""

from .graph import (
    EdgeLayer,
    GraphFormatError,
    MultilayerGraph,
    density,
    induce,
    load_layer_files,
    load_multilayer,
    save_multilayer,
    total_layer_weight,
    weighted_degree,
)
from .lp import LpInstance, LpSolution, LpSolverError, solve_basic_optimal
from .metrics import MetricConfig, UnsupportedMetricError, make_metric_config
from .prune import LowerBound, lower_bound_lp, remove_useless
from .single_layer import LayerOptimum, balalau_prune, densest_exact, greedy_peeling, layer_optima
from .stochastic import (
    AbLpSolution,
    PruningError,
    SubsetDistribution,
    build_ab_lp,
    purify_x,
    round_to_distribution,
    solve_ab_density,
)

__version__ = "0.1.0"
