"""Exhaustive enumeration, the reference oracle for :func:`solve`."""

from __future__ import annotations

import time

import numpy as np

from .program import BilpSolution, BinaryProgram, ProgramTooLargeError, Status

MAX_BRUTE_VARS = 25
_CHUNK_BITS = 16


def _chunk(n, start, count):
    # row r encodes the integer start + r with variable 0 as the most significant bit
    codes = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.float64)


def solve_brute_force(p: BinaryProgram, tol: float = 1e-9) -> BilpSolution:
    """Enumerate all ``2**num_vars`` assignments.

    Among assignments within ``tol`` of the best objective the lexicographically
    largest one wins (variable 0 most significant), the same rule as
    :func:`solve`.
    """
    n = p.num_vars
    if n > MAX_BRUTE_VARS:
        raise ProgramTooLargeError(f"{n} variables exceeds the enumeration cap of {MAX_BRUTE_VARS}")
    t0 = time.perf_counter()
    A_ub, b_ub, A_eq, b_eq = p.dense()
    total = 1 << n
    step = 1 << min(n, _CHUNK_BITS)

    values = np.full(total, -np.inf)
    for start in range(0, total, step):
        X = _chunk(n, start, min(step, total - start))
        ok = np.ones(X.shape[0], dtype=bool)
        if A_ub.shape[0]:
            ok &= np.all(X @ A_ub.T <= b_ub + 1e-9, axis=1)
        if A_eq.shape[0]:
            ok &= np.all(np.abs(X @ A_eq.T - b_eq) <= 1e-9, axis=1)
        values[start:start + X.shape[0]] = np.where(ok, X @ p.objective, -np.inf)

    best = values.max()
    if not np.isfinite(best):
        return BilpSolution(None, -np.inf, Status.INFEASIBLE, total,
                            wall_time=time.perf_counter() - t0)
    code = int(np.flatnonzero(values >= best - tol)[-1])
    assignment = _chunk(n, code, 1)[0].astype(np.int8)
    return BilpSolution(assignment, p.evaluate(assignment), Status.OPTIMAL, total,
                        wall_time=time.perf_counter() - t0)
