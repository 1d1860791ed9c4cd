import numpy as np
import pytest

from stochdense.experiments import SynthSpec, chung_lu_layer
from stochdense.graph import MultilayerGraph, density
from stochdense.oracle import enumerate_densest
from stochdense.single_layer import (
    EmptyLayerError,
    balalau_prune,
    densest_exact,
    greedy_peeling,
    layer_optima,
    level_sets,
)

from _instances import brute_force_densest, random_multilayer, triangle, triangle_pendant


def path3():
    return MultilayerGraph.from_edge_lists(3, [[(0, 1), (1, 2)]])


def star3():
    return MultilayerGraph.from_edge_lists(4, [[(0, 1), (0, 2), (0, 3)]])


def test_greedy_examples():
    assert greedy_peeling(triangle(), 0) == (frozenset({0, 1, 2}), 1.0)
    s, d = greedy_peeling(path3(), 0)
    assert s == {0, 1, 2} and d == pytest.approx(2 / 3)
    s, d = greedy_peeling(star3(), 0)
    assert s == {0, 1, 2, 3} and d == pytest.approx(0.75)


def test_empty_layer_errors():
    g = MultilayerGraph.from_edge_lists(3, [[(0, 1)], []])
    with pytest.raises(EmptyLayerError):
        greedy_peeling(g, 1)
    with pytest.raises(EmptyLayerError):
        densest_exact(g, 1)


def test_exact_examples():
    opt = densest_exact(triangle_pendant(), 0)
    # {0,1,2} and the whole graph both have density 1; the largest optimal level set is returned
    assert opt.opt_density == pytest.approx(1.0, abs=1e-9)
    assert opt.subset in ({0, 1, 2}, {0, 1, 2, 3})
    opt = densest_exact(MultilayerGraph.from_edge_lists(2, [[(0, 1, 3.0)]]), 0)
    assert opt.subset == {0, 1} and opt.opt_density == pytest.approx(1.5)
    two = MultilayerGraph.from_edge_lists(6, [[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]])
    opt = densest_exact(two, 0)
    assert opt.opt_density == pytest.approx(1.0)
    assert opt.subset in ({0, 1, 2}, {3, 4, 5}, set(range(6)))


def test_balalau_examples():
    g = triangle_pendant()
    assert balalau_prune(g, 0, 1.0).n == 4
    h = balalau_prune(g, 0, 1.0 + 1e-6)
    assert h.n == 3 and h.origin == (0, 1, 2)
    assert density(h, 0, range(3)) == 1.0
    assert balalau_prune(g, 0, 0.0).n == 4


def test_balalau_cascade_and_other_layers():
    # path 0-1-2-3 in layer 0: bound 1.5 removes the ends, then the middle drops to degree 0
    g = MultilayerGraph.from_edge_lists(4, [[(0, 1), (1, 2), (2, 3)], [(0, 3)]])
    assert balalau_prune(g, 0, 1.5).n == 0
    h = balalau_prune(g, 0, 1.0)
    assert h.n == 4 and len(h.layers[1]) == 1


def test_level_sets():
    levels = level_sets(np.array([0.4, 0.4, 0.1, 0.1]))
    assert [s for _, s in levels] == [frozenset({0, 1, 2, 3}), frozenset({0, 1})]
    assert [r for r, _ in levels] == pytest.approx([0.1, 0.4])
    # values within the tolerance collapse, zeros are dropped
    levels = level_sets(np.array([0.5, 0.5 + 1e-9, 0.0, 1e-10]))
    assert len(levels) == 1 and levels[0][1] == {0, 1}


def test_layer_optima_empty_layer_and_threads():
    g = MultilayerGraph.from_edge_lists(4, [[(0, 1)], [], [(1, 2), (2, 3), (1, 3)]])
    opts = layer_optima(g)
    assert opts[1].subset == frozenset() and opts[1].opt_density == 0.0
    assert opts[2].opt_density == pytest.approx(1.0)
    assert layer_optima(g, threads=3) == opts


def chung_lu_instance(seed):
    rng = np.random.default_rng(seed)
    spec = SynthSpec(int(rng.integers(5, 61)), float(rng.uniform(2.1, 3.5)), 1, 0, seed=seed)
    lay = chung_lu_layer(spec, rng)
    return MultilayerGraph(spec.n, (lay,))


def test_greedy_two_approximation():
    tested = 0
    for seed in range(260):
        g = chung_lu_instance(seed)
        if len(g.layers[0]) == 0:
            continue
        _, approx = greedy_peeling(g, 0)
        exact = densest_exact(g, 0).opt_density
        assert approx >= 0.5 * exact - 1e-12
        assert approx <= exact + 1e-9
        tested += 1
        if tested == 200:
            break
    assert tested == 200


@pytest.mark.parametrize("seed", range(60))
def test_exact_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    g = random_multilayer(rng, int(rng.integers(2, 10)), 1)
    opt = densest_exact(g, 0)
    assert opt.opt_density == pytest.approx(brute_force_densest(g, 0), abs=1e-7)
    assert opt.opt_density == pytest.approx(density(g, 0, opt.subset), abs=1e-9)
    assert opt.opt_density == pytest.approx(enumerate_densest(g, 0).opt_density, abs=1e-7)


@pytest.mark.parametrize("seed", range(40))
def test_prune_safety(seed):
    rng = np.random.default_rng(1000 + seed)
    g = random_multilayer(rng, int(rng.integers(4, 25)), 2, p=float(rng.uniform(0.1, 0.5)))
    _, lb = greedy_peeling(g, 0)
    pruned = balalau_prune(g, 0, lb)
    full = densest_exact(g, 0, prune=False).opt_density
    assert densest_exact(pruned, 0).opt_density == pytest.approx(full, abs=1e-7)
    assert densest_exact(g, 0).opt_density == pytest.approx(full, abs=1e-7)
