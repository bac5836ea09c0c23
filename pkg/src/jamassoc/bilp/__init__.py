"""Exact solver for binary (0-1) linear programs."""

import numpy as np

from .brute import MAX_BRUTE_VARS, solve_brute_force
from .program import (
    BilpSolution,
    BinaryProgram,
    Constraint,
    InvalidProgramError,
    ProgramTooLargeError,
    SearchEvent,
    SolverOptions,
    Status,
)
from .simplex import LPResult, LPStatus, solve_lp
from .solver import solve


def lp_relaxation_bound(p: BinaryProgram) -> float:
    """Optimal value of the continuous relaxation over ``[0, 1]^n``.

    Returns ``-inf`` when the relaxation is infeasible, which proves the binary
    program infeasible as well.
    """
    A_ub, b_ub, A_eq, b_eq = p.dense()
    res = solve_lp(p.objective, A_ub, b_ub, A_eq, b_eq, np.ones(p.num_vars))
    if res.status is LPStatus.INFEASIBLE:
        return -np.inf
    if res.status is not LPStatus.OPTIMAL:
        raise RuntimeError(f"LP relaxation ended with status {res.status.value}")
    return res.objective


__all__ = [
    "BilpSolution",
    "BinaryProgram",
    "Constraint",
    "InvalidProgramError",
    "LPResult",
    "LPStatus",
    "MAX_BRUTE_VARS",
    "ProgramTooLargeError",
    "SearchEvent",
    "SolverOptions",
    "Status",
    "lp_relaxation_bound",
    "solve",
    "solve_brute_force",
    "solve_lp",
]
