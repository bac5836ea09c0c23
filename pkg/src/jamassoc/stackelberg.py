"""Stackelberg equilibrium of the association game.

The follower's best response is a threshold rule, so the bilevel problem
collapses into one binary program: the unit-step condition becomes the linear
activation row ``v_n >= -lam rho_n - sum_m delta_tilde[n, m] x[n, m]`` (valid
because ``a <= 0`` makes the leader prefer ``v_n = 0`` whenever it is free) and
each product ``v_n x[n, m]`` becomes a binary ``z[n, m]`` pinned by
``z <= (x + v) / 2`` and ``z >= x + v - 1``.

Variable layout of :func:`build_ilp_se`: ``x`` row-major (N*M), then ``y``
(M), ``v`` (N), ``z`` (N*M). :func:`build_p1` uses the first N*M + M.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bilp
from .game import (
    AssociationStrategy,
    CoefficientError,
    GameCoefficients,
    JammerStrategy,
    KnowledgeMode,
    coefficients,
    jammer_best_response,
    jammer_objective,
    leader_payoff,
)
from .model import Scenario, compute_link_probabilities

PAYOFF_TOL = 1e-9
MAX_ORACLE_LEADER_VARS = 22


class SolverLimitError(RuntimeError):
    """The binary solver stopped at its node limit before proving optimality."""


def _x_index(n, m, M):
    return n * M + m


def _add_association_rows(prog: bilp.BinaryProgram, s: Scenario):
    N, M = s.n_sensors, s.n_gateways
    NM = N * M
    for n in range(N):
        prog.add({_x_index(n, m, M): 1.0 for m in range(M)}, "<=", 1.0)
    for m in range(M):
        prog.add({_x_index(n, m, M): 1.0 for n in range(N)}, "<=", float(s.gn_capacity[m]))
    prog.add({NM + m: float(s.gn_cost[m]) for m in range(M)}, "<=", s.budget)
    for n in range(N):
        for m in range(M):
            prog.add({_x_index(n, m, M): 1.0, NM + m: -1.0}, "<=", 0.0)


def _names(N, M, with_follower):
    names = [f"x_{n}_{m}" for n in range(N) for m in range(M)]
    names += [f"y_{m}" for m in range(M)]
    if with_follower:
        names += [f"v_{n}" for n in range(N)]
        names += [f"z_{n}_{m}" for n in range(N) for m in range(M)]
    return names


def build_p1(gc: GameCoefficients, v, s: Scenario) -> bilp.BinaryProgram:
    """The WSN's association program against a fixed victim set ``v``."""
    N, M = s.n_sensors, s.n_gateways
    vv = v.v if isinstance(v, JammerStrategy) else np.asarray(v)
    p = gc.a * vv[:, None] + gc.b
    objective = np.concatenate([p.ravel(), np.zeros(M)])
    prog = bilp.BinaryProgram(N * M + M, objective, var_names=_names(N, M, False))
    _add_association_rows(prog, s)
    return prog


def build_ilp_se(gc: GameCoefficients, s: Scenario, *,
                 literal_activation: bool = False) -> bilp.BinaryProgram:
    """Single-level binary program whose optimum is the leader's equilibrium strategy.

    Parameters
    ----------
    literal_activation : bool
        Write each sensor's activation row with the raw coefficients,
        ``v_n + sum_m delta_tilde[n, m] x[n, m] >= -lam rho_n``. By default an
        equivalent integer row is written instead. A sensor uses at most one
        link, so ``w_n`` is either 0 or a single ``delta_tilde[n, m]``, and the
        raw row forces ``v_n = 1`` exactly when the chosen link has
        ``J[n, m] = (delta_tilde[n, m] + lam rho_n < 0)`` (an idle sensor is
        never forced, since ``lam rho_n >= 0``). The row
        ``v_n - sum_m J[n, m] x[n, m] >= 0`` admits the same binary points with
        coefficients in {0, 1}. That matters when the raw threshold is tiny
        (say 1e-10, from a gateway the jammer barely hears): the raw row then
        sits inside the feasibility tolerance and would let ``v_n = 0``
        through where the follower actually jams.
    """
    if np.any(gc.a > 0):
        raise CoefficientError("the linearized program needs a <= 0 on every link")
    N, M = s.n_sensors, s.n_gateways
    NM = N * M
    v0 = NM + M
    z0 = v0 + N
    objective = np.concatenate([gc.b.ravel(), np.zeros(M + N), gc.a.ravel()])
    prog = bilp.BinaryProgram(2 * NM + N + M, objective, var_names=_names(N, M, True))
    _add_association_rows(prog, s)
    threat = gc.lam * gc.rho
    # the same float expression the threshold rule evaluates for a one-hot row
    forced = (gc.delta_tilde + threat[:, None]) < 0
    for n in range(N):
        row = {v0 + n: 1.0}
        for m in range(M):
            coef = float(gc.delta_tilde[n, m]) if literal_activation else -float(forced[n, m])
            if coef != 0.0:
                row[_x_index(n, m, M)] = coef
        prog.add(row, ">=", -float(threat[n]) if literal_activation else 0.0)
    for n in range(N):
        for m in range(M):
            k = _x_index(n, m, M)
            prog.add({z0 + k: 1.0, k: -0.5, v0 + n: -0.5}, "<=", 0.0)
            prog.add({z0 + k: 1.0, k: -1.0, v0 + n: -1.0}, ">=", -1.0)
    return prog


@dataclass(frozen=True, eq=False)
class Equilibrium:
    x_star: AssociationStrategy
    v_star: JammerStrategy
    z_star: np.ndarray
    leader_payoff: float
    jammer_objective: float
    solver_stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "x": self.x_star.x.tolist(),
            "y": self.x_star.y.tolist(),
            "v": self.v_star.v.tolist(),
            "z": self.z_star.tolist(),
            "leader_payoff": self.leader_payoff,
            "jammer_objective": self.jammer_objective,
            "solver_stats": dict(self.solver_stats),
        }


def _game(s: Scenario, mode, clamp=True, ack_detection=True) -> GameCoefficients:
    lp = compute_link_probabilities(s, clamp=clamp, ack_detection=ack_detection)
    return coefficients(lp, mode, s.lam, s.jam_power)


def _check_status(sol: bilp.BilpSolution, what: str):
    if sol.status is bilp.Status.NODE_LIMIT:
        raise SolverLimitError(f"{what}: node limit hit after {sol.nodes_explored} nodes")
    if sol.status is bilp.Status.INFEASIBLE:
        # x = y = 0 (and v = z = 0) always satisfies every row
        raise AssertionError(f"{what}: solver reported an infeasible program")


def _from_leader(gc: GameCoefficients, x, y, stats) -> Equilibrium:
    strat = AssociationStrategy(x, y)
    v = jammer_best_response(strat, gc)
    z = (v.v[:, None] * strat.x).astype(np.int8)
    return Equilibrium(strat, v, z, leader_payoff(strat, v, gc),
                       jammer_objective(v, strat, gc), stats)


def equilibrium_from_coefficients(gc: GameCoefficients, s: Scenario,
                                  options: bilp.SolverOptions | None = None) -> Equilibrium:
    """Solve the linearized program for given coefficients and extract the equilibrium.

    The follower's strategy is re-derived from the threshold rule rather than
    read off the program: wherever the rule is strict the two agree, and at an
    exact tie the rule's answer (jam) is the one the follower actually plays.
    """
    N, M = s.n_sensors, s.n_gateways
    NM = N * M
    prog = build_ilp_se(gc, s)
    sol = bilp.solve(prog, options)
    _check_status(sol, "ILP-SE")
    a = sol.assignment
    x = a[:NM].reshape(N, M)
    y = a[NM:NM + M]
    stats = {
        "nodes": sol.nodes_explored,
        "tie_break_nodes": sol.tie_break_nodes,
        "wall_time": sol.wall_time,
        "root_bound": sol.root_bound,
        "ilp_objective": sol.objective_value,
        "ilp_v": a[NM + M:NM + M + N].tolist(),
        "ilp_z": a[NM + M + N:].reshape(N, M).tolist(),
    }
    eq = _from_leader(gc, x, y, stats)
    if abs(eq.leader_payoff - sol.objective_value) > PAYOFF_TOL:
        raise AssertionError(
            f"recomputed payoff {eq.leader_payoff!r} disagrees with the program "
            f"optimum {sol.objective_value!r}")
    return eq


def solve_equilibrium(s: Scenario, mode=KnowledgeMode.LEARNED, *, clamp: bool = True,
                      ack_detection: bool = True,
                      options: bilp.SolverOptions | None = None) -> Equilibrium:
    """Stackelberg equilibrium of a scenario (WSN leads, jammer follows).

    Raises
    ------
    SolverLimitError
        If the branch-and-bound node limit is reached.
    CoefficientError
        If unclamped link data puts some ``a > 0``.
    """
    return equilibrium_from_coefficients(_game(s, mode, clamp, ack_detection), s, options)


def solve_p1(gc: GameCoefficients, v, s: Scenario,
             options: bilp.SolverOptions | None = None) -> tuple[AssociationStrategy, float, int]:
    """Best association against a fixed victim set: ``(strategy, payoff, nodes)``."""
    N, M = s.n_sensors, s.n_gateways
    sol = bilp.solve(build_p1(gc, v, s), options)
    _check_status(sol, "P1")
    a = sol.assignment
    strat = AssociationStrategy(a[:N * M].reshape(N, M), a[N * M:])
    return strat, sol.objective_value, sol.nodes_explored


def jam_free_optimum(s: Scenario, options: bilp.SolverOptions | None = None) -> float:
    """Best delivery the WSN could get if the jammer never attacked."""
    lp = compute_link_probabilities(s)
    gc = coefficients(lp, KnowledgeMode.LEARNED, s.lam, s.jam_power)
    return solve_p1(gc, np.zeros(s.n_sensors, dtype=np.int8), s, options)[1]


def brute_force_stackelberg(gc: GameCoefficients, s: Scenario) -> Equilibrium:
    """Solve the bilevel problem literally by enumerating every leader strategy.

    Each feasible ``(x, y)`` is scored with the follower's threshold response;
    the best score wins, ties going to the lexicographically largest leader
    vector (the binary solver's rule).
    """
    N, M = s.n_sensors, s.n_gateways
    NM = N * M
    n_lead = NM + M
    if n_lead > MAX_ORACLE_LEADER_VARS:
        raise bilp.ProgramTooLargeError(
            f"{n_lead} leader variables exceeds the oracle cap of {MAX_ORACLE_LEADER_VARS}")
    shifts = np.arange(n_lead - 1, -1, -1, dtype=np.int64)
    total = 1 << n_lead
    step = 1 << min(n_lead, 16)
    scores = np.full(total, -np.inf)
    for start in range(0, total, step):
        codes = np.arange(start, min(start + step, total), dtype=np.int64)
        bits = ((codes[:, None] >> shifts) & 1).astype(np.float64)
        X = bits[:, :NM].reshape(-1, N, M)
        Y = bits[:, NM:]
        ok = (X.sum(axis=2) <= 1).all(axis=1)
        ok &= (X.sum(axis=1) <= s.gn_capacity[None, :]).all(axis=1)
        ok &= Y @ s.gn_cost <= s.budget + 1e-9
        ok &= (X <= Y[:, None, :]).all(axis=(1, 2))
        w = (gc.delta_tilde[None] * X).sum(axis=2)
        V = (w + gc.lam * gc.rho[None, :] <= 0).astype(float)
        pay = ((gc.a[None] * V[:, :, None] + gc.b[None]) * X).sum(axis=(1, 2))
        scores[start:start + codes.size] = np.where(ok, pay, -np.inf)
    best_val = scores.max()
    best_code = int(np.flatnonzero(scores >= best_val - PAYOFF_TOL)[-1])
    bits = ((np.int64(best_code) >> shifts) & 1).astype(np.int8)
    return _from_leader(gc, bits[:NM].reshape(N, M), bits[NM:],
                        {"leader_strategies": total})


@dataclass
class Check:
    passed: bool
    residual: float
    detail: str = ""


@dataclass
class VerificationReport:
    checks: dict[str, Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list[str]:
        return [name for name, c in self.checks.items() if not c.passed]

    def to_dict(self) -> dict:
        return {name: {"passed": c.passed, "residual": c.residual, "detail": c.detail}
                for name, c in self.checks.items()}


def verify_equilibrium(eq: Equilibrium, gc: GameCoefficients, s: Scenario) -> VerificationReport:
    """Check an equilibrium: association constraints, ``z = v x``, follower
    optimality, and payoff bookkeeping. Never raises; failures land in the report."""
    checks = {}
    N, M = s.n_sensors, s.n_gateways
    x = np.asarray(eq.x_star.x, dtype=float)
    y = np.asarray(eq.x_star.y, dtype=float)
    v = np.asarray(eq.v_star.v, dtype=float)
    z = np.asarray(eq.z_star, dtype=float)

    if x.shape != (N, M) or y.shape != (M,) or v.shape != (N,) or z.shape != (N, M):
        bad = Check(False, np.inf, "shape mismatch with scenario")
        return VerificationReport({k: bad for k in
                                   ("constraints", "linearization", "best_response", "payoff")})

    viol = [
        np.max(x.sum(axis=1) - 1, initial=0.0),
        np.max(x.sum(axis=0) - s.gn_capacity, initial=0.0),
        float(y @ s.gn_cost - s.budget),
        np.max(x - y[None, :], initial=0.0),
    ]
    binary = np.isin(x, (0, 1)).all() and np.isin(y, (0, 1)).all()
    worst = max(0.0, *viol)
    checks["constraints"] = Check(bool(binary and worst <= 1e-9), worst,
                                  "" if binary else "non-binary association")

    resid = float(np.abs(z - v[:, None] * x).max(initial=0.0))
    checks["linearization"] = Check(resid == 0.0, resid)

    br = jammer_best_response(x, gc).v
    flips = int(np.sum(br != v))
    checks["best_response"] = Check(flips == 0, float(flips),
                                    f"{flips} sensor(s) off the threshold rule" if flips else "")

    pay = leader_payoff(x, v, gc)
    obj = jammer_objective(v, x, gc)
    resid = max(abs(pay - eq.leader_payoff), abs(obj - eq.jammer_objective))
    if "ilp_objective" in eq.solver_stats:
        resid = max(resid, abs(pay - eq.solver_stats["ilp_objective"]))
    checks["payoff"] = Check(resid <= PAYOFF_TOL, resid)
    return VerificationReport(checks)


def game_for(s: Scenario, mode=KnowledgeMode.LEARNED, clamp=True,
             ack_detection=True) -> GameCoefficients:
    """Coefficients for a scenario, using its own ``lam`` and jammer power."""
    return _game(s, mode, clamp, ack_detection)


__all__ = [
    "Check",
    "Equilibrium",
    "SolverLimitError",
    "VerificationReport",
    "brute_force_stackelberg",
    "build_ilp_se",
    "build_p1",
    "equilibrium_from_coefficients",
    "game_for",
    "jam_free_optimum",
    "solve_equilibrium",
    "solve_p1",
    "verify_equilibrium",
]
