"""Dense bounded-variable primal simplex.

Solves

    maximize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                0 <= x <= upper

with a two-phase method on a condensed tableau (one column per nonbasic
variable). Nonbasic variables rest at either bound, so the 0/1 box of a
binary relaxation never needs explicit rows. Pricing is Dantzig's rule; after
a run of degenerate pivots the method switches to Bland's rule until it makes
progress again, which rules out cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

_DUAL_TOL = 1e-9
_PIVOT_TOL = 1e-9
_PHASE1_TOL = 1e-9
_DEGENERATE_RUN = 30


class LPStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class LPResult:
    status: LPStatus
    x: np.ndarray | None
    objective: float
    reduced_costs: np.ndarray | None
    iterations: int


class _Tableau:
    """Condensed tableau: a move ``dx`` of the nonbasic variables changes the
    basic ones by ``-T @ dx``. ``beta`` holds the current basic values.
    """

    def __init__(self, T, beta, basis, nonbasic, upper, allowed):
        self.T = T
        self.beta = beta
        self.basis = basis
        self.nonbasic = nonbasic
        self.upper = upper
        self.allowed = allowed
        self.at_upper = np.zeros(upper.size, dtype=bool)
        self.iterations = 0

    def reduced_costs(self, cost):
        return cost[self.nonbasic] - cost[self.basis] @ self.T

    def run(self, cost, max_iter):
        T, beta, basis, nonbasic, upper = self.T, self.beta, self.basis, self.nonbasic, self.upper
        d = self.reduced_costs(cost)
        degenerate = 0
        while True:
            if self.iterations >= max_iter:
                return LPStatus.ITERATION_LIMIT, d
            up = self.at_upper[nonbasic]
            improving = self.allowed[nonbasic] & (
                (~up & (d > _DUAL_TOL)) | (up & (d < -_DUAL_TOL))
            )
            candidates = np.flatnonzero(improving)
            if candidates.size == 0:
                return LPStatus.OPTIMAL, d
            bland = degenerate >= _DEGENERATE_RUN
            if bland:
                q = int(candidates[np.argmin(nonbasic[candidates])])
            else:
                q = int(candidates[np.argmax(np.abs(d[candidates]))])
            j = nonbasic[q]

            sgn = -1.0 if self.at_upper[j] else 1.0
            col = T[:, q]
            alpha = sgn * col
            ub_basic = upper[basis]

            ratios = np.full(alpha.shape, np.inf)
            dec = alpha > _PIVOT_TOL
            ratios[dec] = beta[dec] / alpha[dec]
            inc = (alpha < -_PIVOT_TOL) & np.isfinite(ub_basic)
            ratios[inc] = (ub_basic[inc] - beta[inc]) / (-alpha[inc])
            np.maximum(ratios, 0.0, out=ratios)

            t_row = ratios.min() if ratios.size else np.inf
            t_flip = upper[j]
            self.iterations += 1

            if t_flip <= t_row:
                if not np.isfinite(t_flip):
                    return LPStatus.UNBOUNDED, d
                beta -= (sgn * t_flip) * col
                self.at_upper[j] = not self.at_upper[j]
                degenerate = 0
                continue

            ties = np.flatnonzero(ratios <= t_row + 1e-12)
            if bland:
                r = int(ties[np.argmin(basis[ties])])
            else:
                r = int(ties[np.argmax(np.abs(alpha[ties]))])
            t = ratios[r]
            degenerate = degenerate + 1 if t <= 1e-12 else 0

            leaving = basis[r]
            leaves_at_upper = alpha[r] < 0
            entering_value = t if sgn > 0 else upper[j] - t
            beta -= (sgn * t) * col
            beta[r] = entering_value

            p = T[r, q]
            row = T[r] / p
            colq = col.copy()
            T -= np.multiply.outer(colq, row)
            T[r] = row
            T[:, q] = -colq / p
            T[r, q] = 1.0 / p
            dq = d[q]
            d -= dq * row
            d[q] = -dq / p

            basis[r] = j
            nonbasic[q] = leaving
            self.at_upper[leaving] = leaves_at_upper
            self.at_upper[j] = False

    def values(self):
        x = np.where(self.at_upper, self.upper, 0.0)
        x[self.basis] = self.beta
        return x


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, upper=None, max_iter=None):
    """Maximize ``c @ x`` over a box-bounded polyhedron.

    Parameters
    ----------
    c : array_like, shape (n,)
    A_ub, b_ub : array_like, optional
        Inequality rows ``A_ub @ x <= b_ub``.
    A_eq, b_eq : array_like, optional
        Equality rows.
    upper : array_like, optional
        Upper bounds (``np.inf`` allowed); lower bounds are zero. Defaults to 1
        for every variable.
    max_iter : int, optional

    Returns
    -------
    LPResult
        ``reduced_costs`` holds the phase-2 reduced costs of the structural
        variables; at an optimum they are ``<= 0`` for variables at zero,
        ``>= 0`` for variables at their upper bound and zero for basic ones.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    upper = np.ones(n) if upper is None else np.asarray(upper, dtype=float).ravel()
    if np.any(upper < 0):
        return LPResult(LPStatus.INFEASIBLE, None, -np.inf, None, 0)

    m1, m2 = A_ub.shape[0], A_eq.shape[0]
    m = m1 + m2
    if m == 0:
        x = np.where(c > 0, upper, 0.0)
        if np.any(~np.isfinite(x)):
            return LPResult(LPStatus.UNBOUNDED, None, np.inf, None, 0)
        return LPResult(LPStatus.OPTIMAL, x, float(c @ x), c.copy(), 0)

    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    needs_art = np.ones(m, dtype=bool)
    needs_art[:m1] = b_ub < 0
    art_rows = np.flatnonzero(needs_art)
    n_art = art_rows.size
    # global column ids: structurals [0, n), slacks [n, n+m1), artificials after
    slack_nonbasic = np.flatnonzero(needs_art[:m1])

    nonbasic = np.concatenate([np.arange(n), n + slack_nonbasic]).astype(np.intp)
    T = np.zeros((m, nonbasic.size))
    T[:, :n] = sign[:, None] * A
    T[slack_nonbasic, n + np.arange(slack_nonbasic.size)] = sign[slack_nonbasic]
    beta = sign * b

    basis = np.empty(m, dtype=np.intp)
    basis[:m1] = n + np.arange(m1)
    basis[art_rows] = n + m1 + np.arange(n_art)

    ncols = n + m1 + n_art
    col_upper = np.concatenate([upper, np.full(m1 + n_art, np.inf)])
    allowed = np.ones(ncols, dtype=bool)
    tab = _Tableau(T, beta, basis, nonbasic, col_upper, allowed)
    if max_iter is None:
        max_iter = 50 * (m + ncols)

    if n_art:
        cost1 = np.zeros(ncols)
        cost1[n + m1:] = -1.0
        status, _ = tab.run(cost1, max_iter)
        if status is LPStatus.ITERATION_LIMIT:
            return LPResult(status, None, -np.inf, None, tab.iterations)
        infeas = tab.values()[n + m1:].sum()
        if infeas > _PHASE1_TOL * max(1.0, np.abs(b).max()):
            return LPResult(LPStatus.INFEASIBLE, None, -np.inf, None, tab.iterations)
        # artificials stay pinned at zero from here on
        col_upper[n + m1:] = 0.0
        allowed[n + m1:] = False
        tab.at_upper[n + m1:] = False

    cost2 = np.zeros(ncols)
    cost2[:n] = c
    status, d = tab.run(cost2, max_iter)
    if status is not LPStatus.OPTIMAL:
        return LPResult(status, None, np.inf if status is LPStatus.UNBOUNDED else -np.inf,
                        None, tab.iterations)
    x = np.clip(tab.values()[:n], 0.0, upper)
    reduced = np.zeros(ncols)
    reduced[tab.nonbasic] = d
    return LPResult(LPStatus.OPTIMAL, x, float(c @ x), reduced[:n], tab.iterations)
