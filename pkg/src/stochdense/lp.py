"""Linear programs in maximization form, solved to a basic optimal solution.

The engine is the HiGHS dual simplex (through :func:`scipy.optimize.linprog`),
which returns vertices of the feasible polyhedron without a crossover step.
Basicness is re-verified by a rank computation on the active constraints when
the instance is small enough for a dense rank.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

log = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="
FEAS_TOL = 1e-9
BASIS_CHECK_LIMIT = 1500


class LpSolverError(RuntimeError):
    """The solver stopped without a trustworthy answer (iteration limit, numerics)."""


@dataclass
class LpInstance:
    """``maximize objective @ x`` subject to sparse rows and per-variable bounds."""

    num_vars: int
    objective: np.ndarray = None
    lower: np.ndarray = None
    upper: np.ndarray = None
    _rows: list = field(default_factory=list, repr=False)
    _cols: list = field(default_factory=list, repr=False)
    _vals: list = field(default_factory=list, repr=False)
    senses: list = field(default_factory=list)
    rhs: list = field(default_factory=list)

    def __post_init__(self):
        if self.objective is None:
            self.objective = np.zeros(self.num_vars)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.lower is None:
            self.lower = np.zeros(self.num_vars)
        if self.upper is None:
            self.upper = np.full(self.num_vars, np.inf)
        self.lower = np.asarray(self.lower, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length must equal num_vars")
        if np.any(self.lower > self.upper):
            raise ValueError("every lower bound must be <= its upper bound")

    @property
    def num_constraints(self) -> int:
        return len(self.rhs)

    def add_constraint(self, coeffs, sense: str, rhs: float) -> int:
        """Add one row; ``coeffs`` is a ``{var: coef}`` mapping or (indices, values)."""
        if isinstance(coeffs, dict):
            idx, vals = list(coeffs.keys()), list(coeffs.values())
        else:
            idx, vals = coeffs
        return self.add_constraints(
            np.zeros(len(idx), dtype=np.int64), np.asarray(idx), np.asarray(vals, float), [sense], [rhs]
        )

    def add_constraints(self, local_rows, cols, vals, senses, rhs) -> int:
        """Append a block of rows given in COO form with row ids local to the block."""
        if sense_bad := set(senses) - {LE, EQ, GE}:
            raise ValueError(f"unknown relation(s) {sense_bad}")
        rhs = np.asarray(rhs, dtype=float)
        if not np.all(np.isfinite(rhs)):
            raise ValueError("right-hand sides must be finite")
        cols = np.asarray(cols, dtype=np.int64)
        if cols.size and (cols.min() < 0 or cols.max() >= self.num_vars):
            raise ValueError("constraint references a variable outside 0..num_vars-1")
        first = self.num_constraints
        self._rows.append(np.asarray(local_rows, dtype=np.int64) + first)
        self._cols.append(cols)
        self._vals.append(np.asarray(vals, dtype=float))
        self.senses.extend(senses)
        self.rhs.extend(rhs.tolist())
        return first

    def matrix(self) -> sp.csr_matrix:
        if not self._rows:
            return sp.csr_matrix((0, self.num_vars))
        rows = np.concatenate(self._rows)
        cols = np.concatenate(self._cols)
        vals = np.concatenate(self._vals)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.num_constraints, self.num_vars))

    def to_text(self, names=None) -> str:
        """Plain-text dump for diagnostics."""
        names = names or [f"x{j}" for j in range(self.num_vars)]

        def expr(row):
            terms = [f"{c:+g} {names[j]}" for j, c in zip(row.indices, row.data) if c]
            return " ".join(terms) or "0"

        lines = ["maximize " + expr(sp.csr_matrix(self.objective)), "subject to"]
        a = self.matrix()
        for i in range(self.num_constraints):
            lines.append(f"  c{i}: {expr(a.getrow(i))} {self.senses[i]} {self.rhs[i]:g}")
        lines.append("bounds")
        for j in range(self.num_vars):
            lines.append(f"  {self.lower[j]:g} <= {names[j]} <= {self.upper[j]:g}")
        return "\n".join(lines)


@dataclass
class LpSolution:
    status: str
    values: np.ndarray | None = None
    objective_value: float = float("nan")
    is_basic: bool = False
    basis_verified: bool = False
    max_violation: float = 0.0
    message: str = ""


def constraint_violation(lp: LpInstance, x: np.ndarray) -> float:
    a = lp.matrix()
    ax = a @ x
    b = np.asarray(lp.rhs)
    senses = np.asarray(lp.senses)
    viol = np.zeros(len(b))
    le, ge, eq = senses == LE, senses == GE, senses == EQ
    viol[le] = ax[le] - b[le]
    viol[ge] = b[ge] - ax[ge]
    viol[eq] = np.abs(ax[eq] - b[eq])
    worst = max(viol.max(initial=0.0), (lp.lower - x).max(initial=0.0), (x - lp.upper).max(initial=0.0))
    return float(max(worst, 0.0))


def active_rank(lp: LpInstance, x: np.ndarray, tol: float = FEAS_TOL) -> int:
    """Rank of the constraints (rows and bounds) that are tight at ``x``."""
    a = lp.matrix().toarray()
    b = np.asarray(lp.rhs)
    slack = np.abs(a @ x - b)
    senses = np.asarray(lp.senses)
    tight_rows = (senses == EQ) | (slack <= tol * (1.0 + np.abs(b)))
    eye = np.eye(lp.num_vars)
    at_bound = (np.abs(x - lp.lower) <= tol) | (np.abs(x - lp.upper) <= tol)
    active = np.vstack([a[tight_rows], eye[at_bound]])
    if active.size == 0:
        return 0
    return int(np.linalg.matrix_rank(active))


def solve_basic_optimal(
    lp: LpInstance,
    tol: float = FEAS_TOL,
    basis_check_limit: int = BASIS_CHECK_LIMIT,
) -> LpSolution:
    """Solve ``lp`` to a basic optimal solution.

    Returns ``status`` in {"optimal", "infeasible", "unbounded"}; any other solver
    outcome raises :class:`LpSolverError` instead of returning a guess.
    """
    a = lp.matrix()
    senses = np.asarray(lp.senses)
    b = np.asarray(lp.rhs, dtype=float)
    ub_rows = senses != EQ
    sign = np.where(senses[ub_rows] == GE, -1.0, 1.0)
    a_ub = sp.diags(sign) @ a[ub_rows] if ub_rows.any() else None
    b_ub = sign * b[ub_rows] if ub_rows.any() else None
    eq_rows = senses == EQ
    a_eq = a[eq_rows] if eq_rows.any() else None
    b_eq = b[eq_rows] if eq_rows.any() else None
    bounds = np.column_stack([
        np.where(np.isfinite(lp.lower), lp.lower, np.nan),
        np.where(np.isfinite(lp.upper), lp.upper, np.nan),
    ])
    bounds = [(None if np.isnan(lo) else lo, None if np.isnan(hi) else hi) for lo, hi in bounds]

    res = linprog(
        -lp.objective, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds,
        method="highs-ds",
        options={"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol},
    )
    if res.status == 2:
        return LpSolution("infeasible", message=res.message)
    if res.status == 3:
        return LpSolution("unbounded", message=res.message)
    if res.status != 0:
        raise LpSolverError(f"LP solver failed: {res.message}")

    x = np.asarray(res.x, dtype=float)
    violation = constraint_violation(lp, x)
    if violation > 1e3 * tol:
        raise LpSolverError(f"solver returned a point violating constraints by {violation:.3g}")
    sol = LpSolution(
        "optimal", x, float(lp.objective @ x), is_basic=True, max_violation=violation,
        message=res.message,
    )
    if lp.num_vars <= basis_check_limit:
        sol.is_basic = active_rank(lp, x, max(tol, violation)) == lp.num_vars
        sol.basis_verified = True
        if not sol.is_basic:
            log.warning("simplex output failed the active-rank basicness check")
    return sol
