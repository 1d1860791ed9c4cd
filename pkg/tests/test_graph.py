import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochdense.graph import (
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

from _instances import disjoint_edges, random_multilayer, triangle


def test_load_basic():
    g = load_multilayer(b"0\ta\tb\t1.0\n0\tb\tc\t2.0\n")
    assert (g.n, g.k) == (3, 1)
    assert g.labels == ("a", "b", "c")
    assert g.layers[0].edges == [(0, 1, 1.0), (1, 2, 2.0)]


def test_load_merges_duplicates():
    g = load_multilayer(b"0\ta\tb\t1.0\n0\tb\ta\t0.5\n")
    assert g.layers[0].edges == [(0, 1, 1.5)]


def test_load_default_weight_comments_and_layer_order():
    text = "# header\nx\tu\tv\n\nalpha\tv\tw\t2\nx\tw\tu\n"
    g = load_multilayer(io.StringIO(text))
    assert g.layer_names == ("x", "alpha")
    assert g.layers[0].edges == [(0, 1, 1.0), (0, 2, 1.0)]
    assert g.layers[1].edges == [(1, 2, 2.0)]


@pytest.mark.parametrize("text, fragment", [
    (b"0\ta\ta\t1.0\n", "self-loop"),
    (b"0\ta\tb\t-1\n", "non-positive"),
    (b"0\ta\tb\t0\n", "non-positive"),
    (b"0\ta\n", "fields"),
    (b"0\ta\tb\tx\n", "bad weight"),
    (b"", "no edges"),
    (b"# only comments\n", "no edges"),
])
def test_load_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        load_multilayer(text)


def test_load_error_reports_line_number():
    with pytest.raises(GraphFormatError) as err:
        load_multilayer(b"0\ta\tb\n# ok\n0\tc\tc\n")
    assert err.value.line == 3


def test_layer_file_mode(tmp_path):
    (tmp_path / "l0.tsv").write_text("a\tb\nb\tc\t3\n")
    (tmp_path / "l1.tsv").write_text("c\td\n")
    g = load_layer_files([tmp_path / "l0.tsv", tmp_path / "l1.tsv"])
    assert (g.n, g.k) == (4, 2)
    assert total_layer_weight(g, 0) == 4.0


def test_constructor_invariants():
    with pytest.raises(ValueError):
        MultilayerGraph.from_edge_lists(2, [[(0, 0)]])
    with pytest.raises(ValueError):
        MultilayerGraph.from_edge_lists(2, [[(0, 2)]])
    with pytest.raises(ValueError):
        MultilayerGraph.from_edge_lists(2, [[(0, 1, 0.0)]])
    with pytest.raises(ValueError):
        MultilayerGraph(2, ())


def test_density_examples():
    assert density(triangle(), 0, {0, 1, 2}) == 1.0
    assert density(triangle(), 0, set()) == 0.0
    g = MultilayerGraph.from_edge_lists(2, [[(0, 1, 3.0)]])
    assert density(g, 0, {0, 1}) == 1.5


def test_weighted_degree_examples():
    g = triangle()
    assert weighted_degree(g, 0, {0, 1, 2}, 0) == 2.0
    assert weighted_degree(g, 0, {0, 1}, 0) == 1.0
    iso = MultilayerGraph.from_edge_lists(3, [[(0, 1)]])
    assert weighted_degree(iso, 0, {0, 1, 2}, 2) == 0.0
    with pytest.raises(ValueError):
        weighted_degree(g, 0, {1, 2}, 0)


def test_total_layer_weight_examples():
    assert total_layer_weight(triangle(), 0) == 3.0
    g = MultilayerGraph.from_edge_lists(3, [[], [(0, 1, 1.5), (1, 2, 2.5)]])
    assert total_layer_weight(g, 0) == 0.0
    assert total_layer_weight(g, 1) == 4.0


def test_induce_examples():
    sub = induce(triangle(), {0, 1})
    assert sub.n == 2 and sub.layers[0].edges == [(0, 1, 1.0)]
    g = disjoint_edges()
    sub = induce(g, {0, 1})
    assert sub.k == 2 and len(sub.layers[0]) == 1 and len(sub.layers[1]) == 0
    with pytest.raises(ValueError):
        induce(g, set())


def test_induce_keeps_labels_and_origin():
    g = load_multilayer(b"0\ta\tb\n0\tb\tc\n0\tc\td\n")
    sub = induce(g, {1, 2, 3})
    assert sub.labels == ("b", "c", "d")
    assert sub.origin == (1, 2, 3)
    subsub = induce(sub, {1, 2})
    assert subsub.labels == ("c", "d")
    assert subsub.origin == (2, 3)


def test_union_edges_shared_across_layers():
    g = MultilayerGraph.from_edge_lists(3, [[(0, 1), (1, 2)], [(1, 0, 2.0)]])
    eu, ev, per_layer = g.union_edges
    assert list(zip(eu.tolist(), ev.tolist())) == [(0, 1), (1, 2)]
    assert per_layer[0].tolist() == [0, 1]
    assert per_layer[1].tolist() == [0]


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_handshake_identity(n, k, seed):
    rng = np.random.default_rng(seed)
    g = random_multilayer(rng, n, k, all_nonempty=False)
    s = {v for v in range(n) if rng.random() < 0.6} or {0}
    for i in range(k):
        degree_sum = sum(weighted_degree(g, i, s, v) for v in s)
        assert degree_sum == pytest.approx(2 * density(g, i, s) * len(s), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_induce_full_set_preserves_densities(n, k, seed):
    rng = np.random.default_rng(seed)
    g = random_multilayer(rng, n, k, all_nonempty=False)
    h = induce(g, range(n))
    s = {v for v in range(n) if rng.random() < 0.5}
    for i in range(k):
        assert density(h, i, s) == pytest.approx(density(g, i, s), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_save_load_round_trip(n, k, seed):
    rng = np.random.default_rng(seed)
    g = random_multilayer(rng, n, k, all_nonempty=False)
    buf = io.StringIO()
    save_multilayer(g, buf)
    h = load_multilayer(buf.getvalue().encode())
    assert (h.n, h.k) == (g.n, g.k)
    relabel = {lab: i for i, lab in enumerate(h.labels)}
    for i in range(k):
        # edge weights round-trip exactly; only summation order differs
        assert total_layer_weight(h, i) == pytest.approx(total_layer_weight(g, i), rel=1e-12)
        mapped = sorted(
            (min(relabel[g.labels[a]], relabel[g.labels[b]]), max(relabel[g.labels[a]], relabel[g.labels[b]]), w)
            for a, b, w in g.layers[i].edges
        )
        assert mapped == h.layers[i].edges
