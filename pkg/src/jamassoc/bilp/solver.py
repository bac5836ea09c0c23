"""Exact branch-and-bound for binary linear programs.

The search runs on the presolved program: LP relaxations come from the
bounded simplex in :mod:`.simplex`, every node is tightened by bound
propagation first, branching picks the most fractional variable (lowest index
on ties) and the open node with the best bound is expanded next (deepest on
ties). A second pass then walks the variables in index order and pins every
tie between optimal assignments towards 1, so the result does not depend on
the order in which the search happened to meet them.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass

import numpy as np

from .presolve import Presolved, Propagator, presolve
from .program import (
    BilpSolution,
    BinaryProgram,
    InvalidProgramError,
    SearchEvent,
    SolverOptions,
    Status,
)
from .simplex import LPStatus, solve_lp


@dataclass
class _NodeLP:
    feasible: bool
    bound: float = -np.inf
    x: np.ndarray | None = None
    free: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None


class _Search:
    def __init__(self, work: Presolved, opts: SolverOptions):
        self.work = work
        self.opts = opts
        self.prop = Propagator(work.A, work.b)
        self.pos = np.maximum(work.A, 0.0)
        self.nodes = 0
        self.root_bound = np.nan

    def relax(self, lo, hi) -> _NodeLP:
        w = self.work
        free = np.flatnonzero(lo != hi)
        fixed_part = w.const + w.c @ lo
        if free.size == 0:
            return _NodeLP(True, fixed_part, lo.copy(), free)
        b_fix = w.b - w.A @ lo
        Af = w.A[:, free]
        # rows that cannot bind with the remaining free variables are dropped
        live = self.pos[:, free].sum(axis=1) > b_fix + 1e-12
        lp = solve_lp(w.c[free], Af[live], b_fix[live])
        if lp.status is not LPStatus.OPTIMAL:
            return _NodeLP(False)
        x = lo.copy()
        x[free] = lp.x
        return _NodeLP(True, fixed_part + lp.objective, x, free, lp.reduced_costs)

    def feasible(self, x) -> bool:
        return bool(np.all(self.work.A @ x <= self.work.b + 1e-9))

    def value(self, x) -> float:
        return float(self.work.const + self.work.c @ x)

    def run(self, lo, hi, incumbent=None, prune_below=-np.inf, stop_at=None):
        """Best-bound search below the box ``lo``/``hi``.

        Returns ``(status, x_best, value_best, root_lp)``. With ``stop_at`` the
        search ends at the first assignment whose value reaches it.
        """
        opts = self.opts
        tol = opts.prune_tol
        best_x = None if incumbent is None else incumbent[0]
        best = -np.inf if incumbent is None else incumbent[1]
        counter = itertools.count()
        root_lp = None
        lo, hi = lo.copy(), hi.copy()
        if not self.prop(lo, hi):
            return Status.INFEASIBLE if best_x is None else Status.OPTIMAL, best_x, best, None
        heap = [(-np.inf, 0, next(counter), lo, hi)]
        while heap:
            if stop_at is not None and best >= stop_at:
                break
            key, neg_depth, _, lo, hi = heapq.heappop(heap)
            parent_bound = -key
            if parent_bound <= best + tol or parent_bound < prune_below:
                continue
            if self.nodes >= opts.node_limit:
                heapq.heappush(heap, (key, neg_depth, next(counter), lo, hi))
                return Status.NODE_LIMIT, best_x, best, root_lp
            self.nodes += 1
            node = self.relax(lo, hi)
            if root_lp is None:
                root_lp = node
                if np.isnan(self.root_bound):
                    self.root_bound = node.bound if node.feasible else -np.inf
            if not node.feasible:
                continue
            bound = node.bound
            x = node.x
            frac = np.minimum(x - lo, hi - x)
            if frac.max(initial=0.0) <= opts.integrality_tol:
                cand = np.round(x)
                if self.feasible(cand):
                    val = self.value(cand)
                    if val > best + tol:
                        best, best_x = val, cand
                    self._trace(-neg_depth, bound, best, heap)
                    continue
                frac = np.where(np.abs(x - np.round(x)) > 0, frac, 0.0)
                if frac.max(initial=0.0) <= 0.0:
                    continue
            else:
                # cheap rounding heuristic: drop every fractional variable to 0
                cand = np.floor(x + opts.integrality_tol)
                if self.feasible(cand):
                    val = self.value(cand)
                    if val > best + tol:
                        best, best_x = val, cand
            self._trace(-neg_depth, bound, best, heap)
            if bound <= best + tol or bound < prune_below:
                continue
            j = int(np.argmax(frac))
            first = 1.0 if x[j] >= 0.5 else 0.0
            for val in (first, 1.0 - first):
                clo, chi = lo.copy(), hi.copy()
                clo[j] = chi[j] = val
                if self.prop(clo, chi, [j]):
                    heapq.heappush(heap, (-bound, neg_depth - 1, next(counter), clo, chi))
        if best_x is None:
            return Status.INFEASIBLE, None, -np.inf, root_lp
        return Status.OPTIMAL, best_x, best, root_lp

    def _trace(self, depth, bound, best, heap):
        if self.opts.trace is None:
            return
        pending = -heap[0][0] if heap else -np.inf
        self.opts.trace(SearchEvent(
            node=self.nodes, depth=depth, node_bound=bound, incumbent=best,
            global_bound=max(bound, pending), root_bound=self.root_bound))


def _lexicographic_polish(search: _Search, target, witness, root_lp, n_orig):
    """Among assignments worth at least ``target``, pick the lexicographically
    largest one (index 0 most significant)."""
    work = search.work
    lo, hi = work.lo.copy(), work.hi.copy()
    search.prop(lo, hi)
    start_nodes = search.nodes
    tol = search.opts.prune_tol

    rc_cap = {}
    if root_lp is not None and root_lp.reduced_costs is not None:
        for pos, j in enumerate(root_lp.free):
            rc_cap[int(j)] = (root_lp.x[j], root_lp.reduced_costs[pos])

    for i in range(n_orig):
        j, comp = work.representative(i)
        if lo[j] == hi[j]:
            continue
        want = 0.0 if comp else 1.0
        if witness[j] == want:
            lo[j] = hi[j] = want
            search.prop(lo, hi, [j])
            continue
        other = 1.0 - want
        possible = True
        if j in rc_cap:
            xj, d = rc_cap[j]
            # LP value with x_j moved to `want` is at most bound + d * (want - xj)
            if (xj == 0.0 or xj == 1.0) and root_lp.bound + d * (want - xj) < target - tol:
                possible = False
        if possible:
            tlo, thi = lo.copy(), hi.copy()
            tlo[j] = thi[j] = want
            if search.prop(tlo, thi, [j]):
                status, x, val, _ = search.run(tlo, thi, prune_below=target, stop_at=target)
                if x is not None and val >= target:
                    witness = x
                    lo, hi = tlo, thi
                    continue
        lo[j] = hi[j] = other
        search.prop(lo, hi, [j])
    return witness, search.nodes - start_nodes


def solve(p: BinaryProgram, options: SolverOptions | None = None) -> BilpSolution:
    """Solve a binary program to proven optimality.

    Ties between equally good assignments (within ``prune_tol``) go to the
    lexicographically largest vector: scanning from index 0, a variable is set
    to 1 whenever some optimal assignment agrees with the choices so far.
    """
    opts = options or SolverOptions()
    if not isinstance(p, BinaryProgram):
        raise InvalidProgramError("expected a BinaryProgram")
    t0 = time.perf_counter()
    n = p.num_vars
    A_ub, b_ub, A_eq, b_eq = p.dense()
    A = np.vstack([A_ub, A_eq, -A_eq]).reshape(-1, n)
    b = np.concatenate([b_ub, b_eq, -b_eq])

    work = presolve(A, b, p.objective, probe=opts.presolve)
    if work.infeasible:
        return BilpSolution(None, -np.inf, Status.INFEASIBLE, 0, wall_time=time.perf_counter() - t0)

    search = _Search(work, opts)
    lo, hi = work.lo.copy(), work.hi.copy()
    incumbent = None
    if search.feasible(lo):
        incumbent = (lo.copy(), search.value(lo))
    status, x, value, root = search.run(lo, hi, incumbent=incumbent)
    nodes = search.nodes
    if x is None:
        return BilpSolution(None, -np.inf, Status.INFEASIBLE, nodes, search.root_bound,
                            wall_time=time.perf_counter() - t0)

    polish_nodes = 0
    if status is Status.OPTIMAL and opts.tie_break:
        x, polish_nodes = _lexicographic_polish(search, value - opts.prune_tol, x, root, n)

    assignment = np.rint(work.expand(x)).astype(np.int8)
    objective = p.evaluate(assignment)
    if p.max_violation(assignment) > 1e-9:
        raise RuntimeError("branch-and-bound returned an infeasible assignment")
    return BilpSolution(assignment, objective, status, nodes, search.root_bound, polish_nodes,
                        time.perf_counter() - t0)
