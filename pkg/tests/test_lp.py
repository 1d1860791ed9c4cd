import itertools

import numpy as np
import pytest

from stochdense.lp import EQ, GE, LE, LpInstance, active_rank, constraint_violation, solve_basic_optimal


def vertex_enumeration(lp: LpInstance):
    """Best objective over all basic feasible points, found by brute force.

    Every vertex is the unique solution of num_vars linearly independent tight
    constraints drawn from the rows and the finite variable bounds.
    """
    a = lp.matrix().toarray()
    b = np.asarray(lp.rhs)
    n = lp.num_vars
    eq_rows = [i for i, s in enumerate(lp.senses) if s == EQ]
    candidates = [(a[i], b[i]) for i, s in enumerate(lp.senses) if s != EQ]
    for j in range(n):
        for bound in (lp.lower[j], lp.upper[j]):
            if np.isfinite(bound):
                e = np.zeros(n)
                e[j] = 1.0
                candidates.append((e, bound))
    free = n - len(eq_rows)
    best = -np.inf
    for combo in itertools.combinations(range(len(candidates)), free):
        rows = [a[i] for i in eq_rows] + [candidates[c][0] for c in combo]
        rhs = [b[i] for i in eq_rows] + [candidates[c][1] for c in combo]
        try:
            x = np.linalg.solve(np.array(rows), rhs)
        except np.linalg.LinAlgError:
            continue
        if constraint_violation(lp, x) <= 1e-9:
            best = max(best, lp.objective @ x)
    return best


def random_bounded_lp(rng, nv, nc):
    lp = LpInstance(nv, objective=rng.normal(size=nv), upper=rng.uniform(1, 5, nv))
    for _ in range(nc):
        idx = rng.choice(nv, size=rng.integers(1, nv + 1), replace=False)
        sense = rng.choice([LE, LE, GE])
        coefs = rng.normal(size=len(idx))
        # rhs chosen so x = 0.5 * upper stays feasible most of the time
        x0 = 0.5 * lp.upper[idx]
        base = coefs @ x0
        rhs = base + rng.uniform(0, 2) if sense == LE else base - rng.uniform(0, 2)
        lp.add_constraint((idx, coefs), sense, rhs)
    return lp


def test_single_bound():
    lp = LpInstance(1, objective=[1.0], lower=[-np.inf])
    lp.add_constraint({0: 1.0}, LE, 1.0)
    sol = solve_basic_optimal(lp)
    assert sol.status == "optimal" and sol.values[0] == pytest.approx(1.0)


def test_box_optimum():
    lp = LpInstance(2, objective=[1.0, 1.0])
    lp.add_constraint({0: 1.0}, LE, 2.0)
    lp.add_constraint({1: 1.0}, LE, 3.0)
    sol = solve_basic_optimal(lp)
    assert np.allclose(sol.values, [2.0, 3.0]) and sol.objective_value == pytest.approx(5.0)
    assert sol.is_basic and sol.basis_verified


def test_two_line_minimax():
    # max t s.t. t <= q1/2, t <= q2/2, q1 + q2 = 1; sweep over q1 is the oracle
    lp = LpInstance(3, objective=[0, 0, 1.0], lower=[0, 0, -np.inf])
    lp.add_constraint({2: 1.0, 0: -0.5}, LE, 0.0)
    lp.add_constraint({2: 1.0, 1: -0.5}, LE, 0.0)
    lp.add_constraint({0: 1.0, 1: 1.0}, EQ, 1.0)
    sol = solve_basic_optimal(lp)
    grid = np.linspace(0, 1, 100001)
    sweep = np.max(np.minimum(0.5 * grid, 0.5 * (1 - grid)))
    assert sweep == pytest.approx(0.25, abs=1e-9)
    assert sol.objective_value == pytest.approx(sweep, abs=1e-9)
    assert np.allclose(sol.values, [0.5, 0.5, 0.25], atol=1e-9)


def test_infeasible_and_unbounded():
    lp = LpInstance(1, objective=[1.0])
    lp.add_constraint({0: 1.0}, LE, -1.0)
    assert solve_basic_optimal(lp).status == "infeasible"
    lp = LpInstance(2, objective=[1.0, 0.0])
    lp.add_constraint({1: 1.0}, LE, 1.0)
    assert solve_basic_optimal(lp).status == "unbounded"


def test_instance_validation():
    with pytest.raises(ValueError):
        LpInstance(2, objective=[1.0])
    with pytest.raises(ValueError):
        LpInstance(1, lower=[2.0], upper=[1.0])
    lp = LpInstance(2)
    with pytest.raises(ValueError):
        lp.add_constraint({2: 1.0}, LE, 0.0)
    with pytest.raises(ValueError):
        lp.add_constraint({0: 1.0}, "<", 0.0)
    with pytest.raises(ValueError):
        lp.add_constraint({0: 1.0}, LE, np.inf)


def test_text_dump_mentions_every_row():
    lp = LpInstance(2, objective=[1.0, 2.0])
    lp.add_constraint({0: 1.0, 1: 1.0}, LE, 4.0)
    lp.add_constraint({0: 1.0}, GE, 1.0)
    text = lp.to_text(["a", "b"])
    assert "maximize +1 a +2 b" in text
    assert "c0: +1 a +1 b <= 4" in text and "c1: +1 a >= 1" in text


@pytest.mark.parametrize("seed", range(40))
def test_random_lps_match_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    nv, nc = int(rng.integers(2, 5)), int(rng.integers(1, 7))
    lp = random_bounded_lp(rng, nv, nc)
    sol = solve_basic_optimal(lp)
    best = vertex_enumeration(lp)
    if not np.isfinite(best):
        assert sol.status == "infeasible"
        return
    assert sol.status == "optimal"
    assert sol.objective_value == pytest.approx(best, abs=1e-7)
    assert sol.max_violation <= 1e-9
    assert sol.objective_value == pytest.approx(lp.objective @ sol.values, abs=1e-9)
    assert active_rank(lp, sol.values) == nv and sol.is_basic


@pytest.mark.parametrize("seed", range(15))
def test_first_order_probe(seed):
    """No single-coordinate feasible step of 1e-6 improves the optimum by > 1e-6."""
    rng = np.random.default_rng(100 + seed)
    lp = random_bounded_lp(rng, 5, 6)
    sol = solve_basic_optimal(lp)
    if sol.status != "optimal":
        pytest.skip("random instance infeasible")
    for j in range(lp.num_vars):
        for step in (1e-6, -1e-6):
            x = sol.values.copy()
            x[j] += step
            if constraint_violation(lp, x) <= 1e-9:
                assert lp.objective @ x <= sol.objective_value + 1e-6


@pytest.mark.parametrize("seed", range(3))
def test_eight_by_twelve_matches_vertex_enumeration(seed):
    # no finite upper bounds (keeps enumeration at C(20, 8)); a budget row bounds the region
    rng = np.random.default_rng(700 + seed)
    lp = LpInstance(8, objective=rng.normal(size=8))
    lp.add_constraint((np.arange(8), np.ones(8)), LE, 10.0)
    for _ in range(11):
        idx = rng.choice(8, size=rng.integers(1, 9), replace=False)
        coefs = rng.normal(size=len(idx))
        lp.add_constraint((idx, coefs), LE, coefs.sum() + rng.uniform(0, 2))
    sol = solve_basic_optimal(lp)
    assert sol.status == "optimal"
    assert sol.max_violation <= 1e-9
    assert sol.objective_value == pytest.approx(vertex_enumeration(lp), abs=1e-7)
