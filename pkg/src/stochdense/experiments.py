"""Synthetic benchmarks and evaluation of subset distributions.

Layers are Chung-Lu power-law graphs; a clique is planted on a hidden vertex set
in all layers or in one random layer, and recovery is scored by the expected
F measure of the distribution.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import EdgeLayer, MultilayerGraph, density
from .metrics import MetricConfig, layer_densities
from .single_layer import peel

RULES = ("sample", "highest_prob", "best_metric")


@dataclass(frozen=True)
class SynthSpec:
    n: int
    exponent: float
    num_layers: int
    clique_size: int
    clique_layers: str = "all"  # "all" or "one"
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.clique_size <= self.n:
            raise ValueError("clique size must lie in [0, n]")
        if not self.exponent > 2:
            raise ValueError("power-law exponent must exceed 2")
        if self.clique_layers not in ("all", "one"):
            raise ValueError("clique_layers must be 'all' or 'one'")
        if self.num_layers < 1:
            raise ValueError("need at least one layer")


def power_law_degrees(n: int, exponent: float, rng: np.random.Generator) -> np.ndarray:
    """Expected degrees with density proportional to d^-exponent on d >= 1.

    Values are capped at sqrt(sum d) so that no pair probability exceeds one.
    Capping lowers the sum, so the cap is iterated to a fixed point.
    """
    d = rng.pareto(exponent - 1.0, size=n) + 1.0
    cap = np.sqrt(d.sum())
    for _ in range(100):
        new_cap = np.sqrt(np.minimum(d, cap).sum())
        if new_cap >= cap - 1e-12:
            break
        cap = new_cap
    return np.minimum(d, cap)


def chung_lu_edges(degrees: np.ndarray, rng: np.random.Generator) -> list[tuple[int, int, float]]:
    total = degrees.sum()
    edges = []
    for u in range(len(degrees) - 1):
        p = np.minimum(1.0, degrees[u] * degrees[u + 1:] / total)
        hits = np.flatnonzero(rng.random(len(p)) < p) + u + 1
        edges.extend((u, int(v), 1.0) for v in hits)
    return edges


def chung_lu_layer(spec: SynthSpec, rng: np.random.Generator) -> EdgeLayer:
    """One unweighted Chung-Lu layer: pair {u, v} kept w.p. min(1, d_u d_v / sum d)."""
    degrees = power_law_degrees(spec.n, spec.exponent, rng)
    return EdgeLayer.from_edges(spec.n, chung_lu_edges(degrees, rng))


def plant_clique(g: MultilayerGraph, v_c: Iterable[int], target_layers: Iterable[int]) -> MultilayerGraph:
    """Add unit edges between all pairs of ``v_c`` in each target layer (weights summed)."""
    members = sorted(set(v_c))
    if len(members) < 2:
        raise ValueError("a planted clique needs at least two vertices")
    targets = set(target_layers)
    pairs = [(a, b, 1.0) for i, a in enumerate(members) for b in members[i + 1:]]
    layers = []
    for idx, lay in enumerate(g.layers):
        if idx in targets:
            lay = EdgeLayer.from_edges(g.n, lay.edges + pairs)
        layers.append(lay)
    return MultilayerGraph(g.n, tuple(layers), g.labels, g.layer_names, g.origin)


def generate(spec: SynthSpec) -> tuple[MultilayerGraph, frozenset]:
    """Build the planted-clique multilayer graph; returns it with the hidden set V_c.

    Each layer and the clique draw get their own child seed, so any layer can be
    regenerated independently of the others.
    """
    children = np.random.SeedSequence(spec.seed).spawn(spec.num_layers + 1)
    clique_rng = np.random.default_rng(children[0])
    layers = tuple(chung_lu_layer(spec, np.random.default_rng(c)) for c in children[1:])
    g = MultilayerGraph(spec.n, layers)
    v_c = frozenset(clique_rng.choice(spec.n, size=spec.clique_size, replace=False).tolist())
    if spec.clique_size >= 2:
        if spec.clique_layers == "all":
            targets = range(spec.num_layers)
        else:
            targets = [int(clique_rng.integers(spec.num_layers))]
        g = plant_clique(g, v_c, targets)
    return g, v_c


# -- evaluation ---------------------------------------------------------------

def _atoms(dist):
    return dist.atoms if hasattr(dist, "atoms") else list(dist)


def expected_metric(dist, g: MultilayerGraph, cfg: MetricConfig, layer: int) -> float:
    atoms = _atoms(dist)
    dens = sum(p * density(g, layer, s) for s, p in atoms)
    return float(cfg.alpha[layer] * dens + cfg.beta[layer])


def f_measure(dist, v_c: Iterable[int]) -> tuple[float, float, float]:
    """Expected precision, recall and their harmonic mean against the hidden set."""
    v_c = frozenset(v_c)
    if not v_c:
        raise ValueError("the hidden vertex set must be nonempty")
    precision = recall = 0.0
    for s, p in _atoms(dist):
        if not s:
            continue
        hit = len(s & v_c)
        precision += p * hit / len(s)
        recall += p * hit / len(v_c)
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f


def worst_layer_value(g: MultilayerGraph, cfg: MetricConfig, subset) -> float:
    dens = np.array([density(g, i, subset) for i in range(g.k)])
    return float((cfg.alpha * dens + cfg.beta).min())


def extract_subset(dist, rule: str, g: MultilayerGraph | None = None,
                   cfg: MetricConfig | None = None, seed: int | None = None) -> frozenset:
    """Pick one subset from a distribution.

    ``sample`` draws by mass with a seeded RNG; ``highest_prob`` takes the heaviest
    atom; ``best_metric`` takes the atom with the best worst-layer value under
    ``cfg``. Ties go to the smaller subset.
    """
    atoms = _atoms(dist)
    if not atoms:
        raise ValueError("distribution has empty support")
    if rule == "sample":
        rng = np.random.default_rng(seed)
        probs = np.array([p for _, p in atoms])
        return atoms[int(rng.choice(len(atoms), p=probs / probs.sum()))][0]
    if rule == "highest_prob":
        return max(atoms, key=lambda a: (a[1], -len(a[0])))[0]
    if rule == "best_metric":
        if g is None or cfg is None:
            raise ValueError("best_metric needs the graph and a metric config")
        return max(atoms, key=lambda a: (worst_layer_value(g, cfg, a[0]), -len(a[0])))[0]
    raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")


def dcs_greedy(g: MultilayerGraph) -> frozenset:
    """Densest-common-subgraph peeling baseline.

    Peels the vertex of minimum degree summed over layers and keeps the prefix
    with the largest minimum layer density.
    """
    if not any(len(lay) for lay in g.layers):
        raise ValueError("every layer is empty")
    subset, _ = peel(g, list(range(g.k)), lambda w, size: w.min() / size)
    return subset


@dataclass
class EvalReport:
    metric: str
    per_layer: list[dict]
    worst_layer: int
    worst_value: float
    precision: float | None = None
    recall: float | None = None
    f_measure: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(dist, g: MultilayerGraph, cfg: MetricConfig, v_c: Iterable[int] | None = None) -> EvalReport:
    """Per-layer expected density and metric; worst layer in the metric's own sense.

    ``worst_value`` is reported with the user-facing sign (positive regret).
    """
    atoms = _atoms(dist)
    dens = layer_densities(g, atoms)
    vals = cfg.alpha * dens + cfg.beta
    per_layer = [
        {"layer": g.layer_names[i], "expected_density": float(dens[i]), "expected_metric": float(cfg.report(vals[i]))}
        for i in range(g.k)
    ]
    worst = int(np.argmin(vals))
    report = EvalReport(cfg.kind, per_layer, worst, float(cfg.report(vals[worst])))
    if v_c is not None:
        report.precision, report.recall, report.f_measure = f_measure(atoms, v_c)
    return report


# -- sweeps --------------------------------------------------------------------

@dataclass
class TrialResult:
    spec: SynthSpec
    metric: str
    value: float
    support: int
    precision: float
    recall: float
    f_measure: float
    subset_f: float
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = asdict(self.spec)
        out.update(metric=self.metric, value=self.value, support=self.support, precision=self.precision,
                   recall=self.recall, f_measure=self.f_measure, subset_f=self.subset_f)
        out.update(self.extra)
        return out


def subset_f(subset, v_c) -> float:
    return f_measure([(frozenset(subset), 1.0)], v_c)[2]


def run_trial(spec: SynthSpec, metrics: Sequence[str] = ("density", "robust_ratio", "regret"),
              baselines: bool = False) -> list[TrialResult]:
    """Solve one synthetic instance under each metric and score clique recovery."""
    from .single_layer import layer_optima
    from .stochastic import solve_ab_density

    g, v_c = generate(spec)
    optima = layer_optima(g)
    results = []
    for kind in metrics:
        dist = solve_ab_density(g, kind, optima=optima)
        cfg = dist.info.config
        p, r, f = f_measure(dist, v_c)
        extra = {}
        if baselines and kind == "density":
            extra["dcs_lp_f"] = subset_f(extract_subset(dist, "best_metric", g, cfg), v_c)
            extra["dcs_greedy_f"] = subset_f(dcs_greedy(g), v_c)
        results.append(TrialResult(spec, kind, cfg.report(dist.value), dist.support_size, p, r, f,
                                   subset_f(extract_subset(dist, "highest_prob"), v_c), extra))
    return results


def write_csv(rows: Sequence[dict], target=None) -> str:
    """Rows as CSV with a header; returns the text and writes it if a handle is given."""
    buf = io.StringIO()
    if rows:
        fields = list(rows[0])
        for row in rows[1:]:
            fields.extend(k for k in row if k not in fields)
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    text = buf.getvalue()
    if target is not None:
        target.write(text)
    return text
