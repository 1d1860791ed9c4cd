"""The (alpha, beta)-density family: density, robust ratio and regret."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .graph import MultilayerGraph, _mask
from .single_layer import LayerOptimum

KINDS = ("density", "robust_ratio", "regret")


class UnsupportedMetricError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricConfig:
    """Per-layer affine transform ``alpha_i * density + beta_i`` to be maximized."""

    kind: str
    alpha: np.ndarray
    beta: np.ndarray
    layer_optima: tuple[LayerOptimum, ...] | None = None

    @property
    def k(self) -> int:
        return len(self.alpha)

    def report(self, value: float) -> float:
        """User-facing number: regret is the negated internal objective."""
        return -value if self.kind == "regret" else value


def normalize_kind(kind: str) -> str:
    kind = kind.replace("-", "_")
    if kind not in KINDS:
        raise UnsupportedMetricError(f"unknown metric {kind!r}; expected one of {KINDS}")
    return kind


def make_metric_config(
    g: MultilayerGraph, kind: str, layer_optima: Sequence[LayerOptimum] | None = None
) -> MetricConfig:
    kind = normalize_kind(kind)
    k = g.k
    if kind == "density":
        return MetricConfig(kind, np.ones(k), np.zeros(k), tuple(layer_optima) if layer_optima else None)
    if layer_optima is None or len(layer_optima) != k:
        raise ValueError(f"metric {kind!r} needs the densest subgraph of each of the {k} layers")
    opt = np.array([o.opt_density for o in layer_optima], dtype=float)
    if kind == "robust_ratio":
        if np.any(opt <= 0):
            bad = [i for i in range(k) if opt[i] <= 0]
            raise UnsupportedMetricError(f"robust ratio is undefined on zero-density layers {bad}")
        return MetricConfig(kind, 1.0 / opt, np.zeros(k), tuple(layer_optima))
    return MetricConfig(kind, np.ones(k), -opt, tuple(layer_optima))


def layer_densities(g: MultilayerGraph, atoms: Iterable[tuple[Iterable[int], float]]) -> np.ndarray:
    """Expected density of every layer under the given (subset, probability) atoms."""
    out = np.zeros(g.k)
    for subset, prob in atoms:
        subset = list(subset)
        if not subset:
            continue
        inside = _mask(g, subset)
        for i, lay in enumerate(g.layers):
            out[i] += prob * lay.w[inside[lay.u] & inside[lay.v]].sum() / len(subset)
    return out


def layer_values(g: MultilayerGraph, cfg: MetricConfig, atoms) -> np.ndarray:
    """Per-layer expected (alpha, beta)-density; the adversary picks the minimum."""
    return cfg.alpha * layer_densities(g, atoms) + cfg.beta
