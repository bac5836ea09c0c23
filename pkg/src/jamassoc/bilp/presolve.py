"""Bound propagation and probing for 0-1 rows ``A @ x <= b``.

Bounds are float arrays ``lo``/``hi`` with entries in {0, 1}; a variable is
fixed when ``lo == hi``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

_TOL = 1e-9


def _group(keys, idx, vals, n):
    """Split parallel (idx, val) lists into ``n`` buckets by sorted ``keys``."""
    bounds = np.searchsorted(keys, np.arange(n + 1)).tolist()
    pairs = list(zip(idx, vals))
    return [pairs[bounds[i]:bounds[i + 1]] for i in range(n)]


class Propagator:
    """Activity-based bound tightening with integer rounding.

    Works row by row from a queue: a row is revisited only when one of its
    variables gets fixed, so a probe costs time proportional to what it implies.
    """

    def __init__(self, A, b, tol=_TOL):
        self.pos = np.maximum(A, 0.0)
        self.neg = np.minimum(A, 0.0)
        self.reach = np.abs(A).max(axis=1, initial=0.0)
        self.b = b.tolist()
        self.tol = tol
        r, k = np.nonzero(A)
        vals = A[r, k].tolist()
        self.row_entries = _group(r, k.tolist(), vals, A.shape[0])
        order = np.argsort(k, kind="stable")
        self.col_entries = _group(k[order], r[order].tolist(),
                                  [vals[i] for i in order.tolist()], A.shape[1])

    def __call__(self, lo, hi, changed=None) -> bool:
        """Tighten ``lo``/``hi`` in place; return False on proven infeasibility.

        ``changed`` lists variables fixed since the box was last propagated;
        only their rows are seeded. Without it every row that can imply
        something is checked.
        """
        tol = self.tol
        b = self.b
        # minimum activity of each row over the box
        act = (self.pos @ lo + self.neg @ hi).tolist()
        if changed is None:
            slack = np.asarray(b) - act
            if np.any(slack < -tol):
                return False
            queue = deque(np.flatnonzero(slack + tol < self.reach).tolist())
        else:
            queue = deque(r for k in changed for r, _ in self.col_entries[k])
        queued = set(queue)
        rows, cols = self.row_entries, self.col_entries
        while queue:
            r = queue.popleft()
            queued.discard(r)
            thr = b[r] - act[r] + tol
            if thr < 0:
                return False
            for k, a in rows[r]:
                if lo[k] == hi[k]:
                    continue
                if a > thr:
                    hi[k] = 0.0
                    sign = -1.0
                elif a < -thr:
                    lo[k] = 1.0
                    sign = 1.0
                else:
                    continue
                # fixing k raises the minimum activity of rows where it was not at its best
                for rr, aa in cols[k]:
                    if aa * sign > 0:
                        act[rr] += aa * sign
                        if rr not in queued:
                            queued.add(rr)
                            queue.append(rr)
            if b[r] - act[r] < -tol:
                return False
        return True


@dataclass
class Presolved:
    """A program rewritten in place over the original index space.

    Aggregated variables have zeroed columns and are fixed at 0 in the working
    bounds; :meth:`expand` recovers them.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    const: float
    lo: np.ndarray
    hi: np.ndarray
    # (k, j, complemented): x_k = x_j, or 1 - x_j when complemented
    aggregations: list[tuple[int, int, bool]] = field(default_factory=list)
    infeasible: bool = False

    def expand(self, x):
        x = np.array(x, dtype=float)
        for k, j, comp in reversed(self.aggregations):
            x[k] = 1.0 - x[j] if comp else x[j]
        return x

    def representative(self, i):
        """Return ``(j, complemented)`` with ``x_i`` expressed through working var ``j``."""
        comp = False
        chain = {k: (j, cmp) for k, j, cmp in self.aggregations}
        while i in chain:
            i, cmp = chain[i]
            comp ^= cmp
        return i, comp


def presolve(A, b, c, probe=True, tol=_TOL) -> Presolved:
    """Root propagation, then probing on each free variable.

    Probing fixes a variable whose one value is infeasible, fixes any variable
    both values agree on, and aggregates ``x_k`` into ``x_j`` when fixing
    ``x_j`` determines ``x_k`` both ways.
    """
    n = c.size
    A = A.astype(float, copy=True)
    b = b.astype(float, copy=True)
    c = c.astype(float, copy=True)
    lo = np.zeros(n)
    hi = np.ones(n)
    out = Presolved(A, b, c, 0.0, lo, hi)
    prop = Propagator(A, b, tol)
    if not prop(lo, hi):
        out.infeasible = True
        return out
    if not probe:
        return out

    dead = np.zeros(n, dtype=bool)
    for j in range(n):
        if lo[j] == hi[j] or dead[j]:
            continue
        lo1, hi1 = lo.copy(), hi.copy()
        lo1[j] = 1.0
        ok1 = prop(lo1, hi1, [j])
        lo0, hi0 = lo.copy(), hi.copy()
        hi0[j] = 0.0
        ok0 = prop(lo0, hi0, [j])
        if not (ok0 or ok1):
            out.infeasible = True
            return out
        if not ok1 or not ok0:
            lo[:], hi[:] = (lo0, hi0) if ok0 else (lo1, hi1)
            continue
        # both branches feasible: keep what they agree on
        fixed_before = lo == hi
        np.maximum(lo, np.minimum(lo0, lo1), out=lo)
        np.minimum(hi, np.maximum(hi0, hi1), out=hi)
        newly = np.flatnonzero((lo == hi) & ~fixed_before)
        if newly.size and not prop(lo, hi, newly.tolist()):
            out.infeasible = True
            return out
        free = (lo != hi) & ~dead
        free[j] = False
        same = free & (lo1 == 1.0) & (hi0 == 0.0)
        flip = free & (hi1 == 0.0) & (lo0 == 1.0)
        merged = np.flatnonzero(same | flip)
        for k in merged:
            comp = bool(flip[k])
            col = A[:, k].copy()
            if comp:
                A[:, j] -= col
                b -= col
                c[j] -= c[k]
                out.const += c[k]
            else:
                A[:, j] += col
                c[j] += c[k]
            A[:, k] = 0.0
            c[k] = 0.0
            lo[k] = hi[k] = 0.0
            dead[k] = True
            out.aggregations.append((int(k), j, comp))
        if merged.size:
            prop = Propagator(A, b, tol)
            if not prop(lo, hi):
                out.infeasible = True
                return out
    return out
