"""Immutable multilayer graph, TSV ingestion, and density/degree primitives."""

from __future__ import annotations

import io
import os
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import IO, Union

import numpy as np

VertexSubset = frozenset
"""Vertex subsets are frozensets of dense integer ids; serialized sorted."""


class GraphFormatError(ValueError):
    """Raised when edge-list input cannot be parsed into a valid graph."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def as_subset(members: Iterable[int]) -> frozenset[int]:
    return frozenset(int(v) for v in members)


@dataclass(frozen=True, eq=False)
class EdgeLayer:
    """Edges of one layer as parallel arrays with u < v, sorted by (u, v)."""

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "EdgeLayer":
        """Build a layer, merging duplicate pairs by summing weights."""
        merged: dict[tuple[int, int], float] = {}
        for a, b, wt in edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop on vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references a vertex outside 0..{n - 1}")
            if not wt > 0:
                raise ValueError(f"non-positive weight {wt} on edge ({a}, {b})")
            key = (a, b) if a < b else (b, a)
            merged[key] = merged.get(key, 0.0) + float(wt)
        keys = sorted(merged)
        u = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        v = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        w = np.fromiter((merged[k] for k in keys), dtype=np.float64, count=len(keys))
        return cls(n, u, v, w)

    @classmethod
    def empty(cls, n: int) -> "EdgeLayer":
        return cls(n, np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0))

    def __len__(self) -> int:
        return len(self.w)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return list(zip(self.u.tolist(), self.v.tolist(), self.w.tolist()))

    @cached_property
    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for a, b, wt in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            adj[a].append((b, wt))
            adj[b].append((a, wt))
        return adj

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degree of every vertex in the full layer."""
        deg = np.zeros(self.n)
        np.add.at(deg, self.u, self.w)
        np.add.at(deg, self.v, self.w)
        return deg

    @property
    def total_weight(self) -> float:
        return float(self.w.sum())


@dataclass(frozen=True, eq=False)
class MultilayerGraph:
    """Vertex set 0..n-1 shared by k >= 1 undirected, positively weighted layers.

    ``labels`` are external vertex names; ``origin`` maps each vertex to its id in
    the graph this one was induced from (composed across repeated induction).
    """

    n: int
    layers: tuple[EdgeLayer, ...]
    labels: tuple[str, ...] = ()
    layer_names: tuple[str, ...] = ()
    origin: tuple[int, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a multilayer graph needs at least one layer")
        for layer in self.layers:
            if layer.n != self.n:
                raise ValueError("layer vertex count does not match graph")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))
        if not self.layer_names:
            object.__setattr__(self, "layer_names", tuple(str(i) for i in range(self.k)))
        if len(self.labels) != self.n or len(self.layer_names) != self.k:
            raise ValueError("label lists do not match graph dimensions")

    @classmethod
    def from_edge_lists(
        cls,
        n: int,
        layers: Sequence[Iterable[tuple]],
        labels: Sequence[str] | None = None,
        layer_names: Sequence[str] | None = None,
    ) -> "MultilayerGraph":
        """Convenience constructor; edges are (u, v) or (u, v, weight) tuples."""
        built = []
        for edges in layers:
            triples = ((e[0], e[1], e[2] if len(e) > 2 else 1.0) for e in edges)
            built.append(EdgeLayer.from_edges(n, triples))
        return cls(n, tuple(built), tuple(labels or ()), tuple(layer_names or ()))

    @property
    def k(self) -> int:
        return len(self.layers)

    @property
    def num_edges(self) -> int:
        """|E| for the union of all layers."""
        return len(self.union_edges[0])

    @cached_property
    def union_edges(self) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
        """Union edge set E as (u, v) arrays plus, per layer, indices into E."""
        if not any(len(layer) for layer in self.layers):
            empty = np.zeros(0, np.int64)
            return empty, empty, [empty for _ in self.layers]
        keys = np.concatenate([layer.u * self.n + layer.v for layer in self.layers])
        uniq, inverse = np.unique(keys, return_inverse=True)
        per_layer = []
        start = 0
        for layer in self.layers:
            per_layer.append(inverse[start:start + len(layer)])
            start += len(layer)
        return uniq // self.n, uniq % self.n, per_layer

    def root_ids(self, subset: Iterable[int]) -> frozenset[int]:
        """Translate ids of this graph into ids of the graph it was induced from."""
        if self.origin is None:
            return as_subset(subset)
        return frozenset(self.origin[v] for v in subset)

    def label_list(self, subset: Iterable[int]) -> list[str]:
        return [self.labels[v] for v in sorted(subset)]


def _mask(g: MultilayerGraph, s: Iterable[int]) -> np.ndarray:
    inside = np.zeros(g.n, dtype=bool)
    idx = np.fromiter(s, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= g.n):
        raise ValueError("subset contains ids outside the graph")
    inside[idx] = True
    return inside


def induced_weight(g: MultilayerGraph, layer: int, s: Iterable[int]) -> float:
    """w_i(S): total weight of layer edges with both endpoints in ``s``."""
    lay = g.layers[layer]
    inside = _mask(g, s)
    return float(lay.w[inside[lay.u] & inside[lay.v]].sum())


def density(g: MultilayerGraph, layer: int, s: Iterable[int]) -> float:
    """Degree density w_i(S)/|S|; zero for the empty set."""
    s = as_subset(s)
    if not s:
        return 0.0
    return induced_weight(g, layer, s) / len(s)


def weighted_degree(g: MultilayerGraph, layer: int, s: Iterable[int], v: int) -> float:
    s = as_subset(s)
    if v not in s:
        raise ValueError(f"vertex {v} is not in the subset")
    return sum(wt for nbr, wt in g.layers[layer].adjacency[v] if nbr in s)


def total_layer_weight(g: MultilayerGraph, layer: int) -> float:
    return g.layers[layer].total_weight


def _induce(g: MultilayerGraph, members: Sequence[int]) -> MultilayerGraph:
    members = sorted(members)
    new_id = np.full(g.n, -1, dtype=np.int64)
    new_id[members] = np.arange(len(members))
    layers = []
    for lay in g.layers:
        keep = (new_id[lay.u] >= 0) & (new_id[lay.v] >= 0)
        # relabeling is monotone, so (u, v) order and u < v survive
        layers.append(EdgeLayer(len(members), new_id[lay.u[keep]], new_id[lay.v[keep]], lay.w[keep]))
    origin = tuple(members) if g.origin is None else tuple(g.origin[v] for v in members)
    return MultilayerGraph(
        len(members),
        tuple(layers),
        tuple(g.labels[v] for v in members),
        g.layer_names,
        origin,
    )


def induce(g: MultilayerGraph, s: Iterable[int]) -> MultilayerGraph:
    """Subgraph induced by ``s`` in every layer, relabeled to 0..|s|-1.

    Layers that lose all their edges are kept, so ``k`` never changes.
    """
    s = as_subset(s)
    if not s:
        raise ValueError("cannot induce on an empty vertex subset")
    _mask(g, s)
    return _induce(g, list(s))


# -- TSV dialect -------------------------------------------------------------

Source = Union[str, bytes, os.PathLike, IO]


def _read_lines(source: Source) -> list[str]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            data = fh.read()
    elif isinstance(source, bytes):
        data = source
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return data.splitlines()


def _split(line: str) -> list[str]:
    return line.split("\t") if "\t" in line else line.split()


def _parse_weight(token: str, lineno: int) -> float:
    try:
        wt = float(token)
    except ValueError:
        raise GraphFormatError(f"bad weight {token!r}", lineno) from None
    if not np.isfinite(wt) or wt <= 0:
        raise GraphFormatError(f"non-positive weight {token!r}", lineno)
    return wt


class _Builder:
    def __init__(self, vertices: Iterable[str] = ()):
        self.vertex_ids: dict[str, int] = {}
        self.layer_ids: dict[str, int] = {}
        self.edges: list[dict[tuple[int, int], float]] = []
        for label in vertices:
            self.vertex(label)

    def vertex(self, label: str) -> int:
        return self.vertex_ids.setdefault(label, len(self.vertex_ids))

    def layer(self, name: str) -> int:
        if name not in self.layer_ids:
            self.layer_ids[name] = len(self.layer_ids)
            self.edges.append({})
        return self.layer_ids[name]

    def add(self, layer: int, a: str, b: str, wt: float, lineno: int):
        if a == b:
            raise GraphFormatError(f"self-loop on vertex {a!r}", lineno)
        u, v = self.vertex(a), self.vertex(b)
        key = (u, v) if u < v else (v, u)
        bucket = self.edges[layer]
        bucket[key] = bucket.get(key, 0.0) + wt

    def build(self) -> MultilayerGraph:
        n = len(self.vertex_ids)
        layers = tuple(
            EdgeLayer.from_edges(n, ((u, v, wt) for (u, v), wt in bucket.items()))
            for bucket in self.edges
        )
        return MultilayerGraph(n, layers, tuple(self.vertex_ids), tuple(self.layer_ids))


def _pragma(builder: _Builder, raw: str, lineno: int):
    parts = raw.rstrip("\r\n").split("\t")
    if len(parts) < 2:
        raise GraphFormatError("malformed #% pragma", lineno)
    if parts[1] == "layers":
        for name in parts[2:]:
            builder.layer(name)
    elif parts[1] == "vertices":
        for label in parts[2:]:
            builder.vertex(label)
    else:
        raise GraphFormatError(f"unknown pragma {parts[1]!r}", lineno)


def load_multilayer(source: Source, vertices: Iterable[str] = ()) -> MultilayerGraph:
    """Parse ``layer<TAB>u<TAB>v[<TAB>weight]`` lines.

    Lines starting with ``#`` and blank lines are skipped, except ``#%`` pragmas
    (``#%<TAB>layers<TAB>name...`` and ``#%<TAB>vertices<TAB>label...``) which
    declare layers and vertices up front so empty layers and isolated vertices
    survive a save/load round trip. Whitespace other than
    tabs is accepted as a separator when a line contains no tab. ``vertices``
    pre-registers labels (e.g. a vertex universe) so isolated vertices survive.
    """
    builder = _Builder(vertices)
    for lineno, raw in enumerate(_read_lines(source), start=1):
        line = raw.strip()
        if line.startswith("#%"):
            _pragma(builder, raw, lineno)
            continue
        if not line or line.startswith("#"):
            continue
        parts = _split(line)
        if len(parts) not in (3, 4):
            raise GraphFormatError(f"expected 3 or 4 fields, got {len(parts)}", lineno)
        wt = _parse_weight(parts[3], lineno) if len(parts) == 4 else 1.0
        builder.add(builder.layer(parts[0]), parts[1], parts[2], wt, lineno)
    if not builder.edges or not builder.vertex_ids:
        raise GraphFormatError("input contains no edges")
    return builder.build()


def load_layer_files(sources: Sequence[Source], vertices: Iterable[str] = ()) -> MultilayerGraph:
    """Per-layer file mode: each source holds ``u<TAB>v[<TAB>weight]`` lines."""
    builder = _Builder(vertices)
    for index, source in enumerate(sources):
        layer = builder.layer(str(index))
        for lineno, raw in enumerate(_read_lines(source), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = _split(line)
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"expected 2 or 3 fields, got {len(parts)}", lineno)
            wt = _parse_weight(parts[2], lineno) if len(parts) == 3 else 1.0
            builder.add(layer, parts[0], parts[1], wt, lineno)
    if not builder.edges or not builder.vertex_ids:
        raise GraphFormatError("input contains no edges")
    return builder.build()


def save_multilayer(g: MultilayerGraph, target: Union[str, os.PathLike, IO[str]]) -> None:
    """Write ``g`` in the TSV dialect, one edge per line, weights as repr floats."""
    buf = io.StringIO()
    buf.write("\t".join(["#%", "layers", *g.layer_names]) + "\n")
    isolated = [g.labels[v] for v in range(g.n) if not any(lay.degrees[v] for lay in g.layers)]
    if isolated:
        buf.write("\t".join(["#%", "vertices", *isolated]) + "\n")
    for name, lay in zip(g.layer_names, g.layers):
        for a, b, wt in lay.edges:
            buf.write(f"{name}\t{g.labels[a]}\t{g.labels[b]}\t{wt!r}\n")
    text = buf.getvalue()
    if isinstance(target, (str, os.PathLike)):
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        target.write(text)
