"""Binary linear programs and their solutions."""

from __future__ import annotations

import enum
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field

import numpy as np

FEASIBILITY_TOL = 1e-9

SENSES = ("<=", ">=", "=")


class InvalidProgramError(ValueError):
    """Raised for malformed programs (bad sense, non-finite data, bad index)."""


class ProgramTooLargeError(ValueError):
    """Raised when exhaustive enumeration is refused."""


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    NODE_LIMIT = "node_limit"


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, float]
    sense: str
    rhs: float


@dataclass
class BinaryProgram:
    """Maximize ``objective @ x`` over ``x in {0,1}^num_vars``.

    Constraints are stored sparsely; :meth:`dense` gives the matrix form.
    """

    num_vars: int
    objective: np.ndarray
    constraints: list[Constraint] = field(default_factory=list)
    var_names: list[str] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        if self.num_vars < 0 or self.objective.size != self.num_vars:
            raise InvalidProgramError(
                f"objective has {self.objective.size} entries for {self.num_vars} variables")
        if not np.all(np.isfinite(self.objective)):
            raise InvalidProgramError("objective coefficients must be finite")
        if self.var_names is not None and len(self.var_names) != self.num_vars:
            raise InvalidProgramError("var_names length does not match num_vars")
        checked = []
        for con in self.constraints:
            checked.append(self._check(con))
        self.constraints = checked

    def _check(self, con: Constraint) -> Constraint:
        if con.sense not in SENSES:
            raise InvalidProgramError(f"unknown constraint sense {con.sense!r}")
        if not np.isfinite(con.rhs):
            raise InvalidProgramError("constraint right-hand side must be finite")
        coeffs = {}
        for j, a in con.coeffs.items():
            j = int(j)
            if not 0 <= j < self.num_vars:
                raise InvalidProgramError(f"variable index {j} out of range")
            if not np.isfinite(a):
                raise InvalidProgramError("constraint coefficients must be finite")
            if a != 0.0:
                coeffs[j] = coeffs.get(j, 0.0) + float(a)
        return Constraint(coeffs, con.sense, float(con.rhs))

    def add(self, coeffs: Mapping[int, float], sense: str, rhs: float) -> None:
        self.constraints.append(self._check(Constraint(coeffs, sense, rhs)))

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def dense(self):
        """Return ``(A_ub, b_ub, A_eq, b_eq)`` with ``>=`` rows negated."""
        n = self.num_vars
        ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
        for con in self.constraints:
            row = np.zeros(n)
            for j, a in con.coeffs.items():
                row[j] = a
            if con.sense == "<=":
                ub_rows.append(row)
                ub_rhs.append(con.rhs)
            elif con.sense == ">=":
                ub_rows.append(-row)
                ub_rhs.append(-con.rhs)
            else:
                eq_rows.append(row)
                eq_rhs.append(con.rhs)
        A_ub = np.array(ub_rows).reshape(-1, n)
        A_eq = np.array(eq_rows).reshape(-1, n)
        return A_ub, np.array(ub_rhs, dtype=float), A_eq, np.array(eq_rhs, dtype=float)

    def evaluate(self, x) -> float:
        return float(self.objective @ np.asarray(x, dtype=float))

    def max_violation(self, x) -> float:
        """Largest constraint violation of ``x`` (0 when feasible)."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        for con in self.constraints:
            lhs = sum(a * x[j] for j, a in con.coeffs.items())
            if con.sense == "<=":
                worst = max(worst, lhs - con.rhs)
            elif con.sense == ">=":
                worst = max(worst, con.rhs - lhs)
            else:
                worst = max(worst, abs(lhs - con.rhs))
        return worst

    def is_feasible(self, x, tol: float = FEASIBILITY_TOL) -> bool:
        x = np.asarray(x)
        if x.shape != (self.num_vars,) or not np.all((x == 0) | (x == 1)):
            return False
        return self.max_violation(x) <= tol

    def name(self, j: int) -> str:
        return self.var_names[j] if self.var_names else f"x{j}"

    def to_lp_text(self) -> str:
        """Plain-text dump close to CPLEX LP format, for external cross-checks."""

        def expr(items):
            parts = []
            for j, a in items:
                sign = "-" if a < 0 else "+"
                parts.append(f"{sign} {abs(a):.17g} {self.name(j)}")
            text = " ".join(parts) if parts else "0"
            return text[2:] if text.startswith("+ ") else text

        lines = ["Maximize", " obj: " + expr(
            (j, a) for j, a in enumerate(self.objective) if a != 0.0), "Subject To"]
        for i, con in enumerate(self.constraints):
            lines.append(f" c{i}: {expr(sorted(con.coeffs.items()))} {con.sense} {con.rhs:.17g}")
        lines.append("Binary")
        lines.extend(" " + self.name(j) for j in range(self.num_vars))
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass
class BilpSolution:
    assignment: np.ndarray | None
    objective_value: float
    status: Status
    nodes_explored: int
    root_bound: float = np.nan
    tie_break_nodes: int = 0
    wall_time: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


@dataclass(frozen=True)
class SearchEvent:
    """Snapshot handed to :attr:`SolverOptions.trace` after each node."""

    node: int
    depth: int
    node_bound: float
    incumbent: float
    global_bound: float
    root_bound: float


@dataclass(frozen=True)
class SolverOptions:
    node_limit: int = 10_000_000
    integrality_tol: float = 1e-6
    prune_tol: float = 1e-9
    presolve: bool = True
    tie_break: bool = True
    trace: Callable[[SearchEvent], None] | None = None
