"""Alternating pure best responses between the WSN and the jammer.

Each round the WSN re-solves its association program against the jammer's last
victim set, then the jammer answers with its threshold rule. Round 0 starts
from a silent jammer unless an initial victim set is supplied.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bilp
from .game import (
    AssociationStrategy,
    GameCoefficients,
    JammerStrategy,
    KnowledgeMode,
    jammer_best_response,
    leader_payoff,
)
from .model import InvalidInputError, Scenario
from .stackelberg import game_for, solve_p1


@dataclass(frozen=True, eq=False)
class PlayRound:
    x: AssociationStrategy
    v: JammerStrategy
    leader_payoff: float
    nodes: int = 0

    def key(self) -> bytes:
        return self.x.x.tobytes() + self.x.y.tobytes() + self.v.v.tobytes()


@dataclass
class PlayTrace:
    rounds: list[PlayRound] = field(default_factory=list)
    converged: bool = False
    cycle_length: int | None = None

    @property
    def rounds_run(self) -> int:
        return len(self.rounds)

    @property
    def payoffs(self) -> np.ndarray:
        return np.array([r.leader_payoff for r in self.rounds])


def detect_cycle(trace: PlayTrace) -> int | None:
    """Smallest period ``p >= 1`` with the last state equal to the one ``p`` rounds earlier.

    ``1`` means the play sits at a fixed point; ``None`` means the final state
    has not occurred before.
    """
    keys = [r.key() for r in trace.rounds]
    if not keys:
        return None
    last = keys[-1]
    for p in range(1, len(keys)):
        if keys[-1 - p] == last:
            return p
    return None


def fictitious_play(s: Scenario, mode=KnowledgeMode.LEARNED, max_rounds: int = 20,
                    init_v=None, *, stop_early: bool = True,
                    gc: GameCoefficients | None = None,
                    options: bilp.SolverOptions | None = None) -> PlayTrace:
    """Play alternating best responses for up to ``max_rounds`` rounds.

    The recorded payoff of a round is the one the WSN experiences after the
    jammer's reply. With ``stop_early`` the play halts as soon as the state
    ``(x, v)`` repeats; a repeat one round back is convergence, anything longer
    is a cycle.
    """
    if max_rounds < 1:
        raise InvalidInputError("max_rounds must be at least 1")
    if gc is None:
        gc = game_for(s, mode)
    N = s.n_sensors
    v = JammerStrategy.silent(N) if init_v is None else JammerStrategy(init_v)
    if v.v.shape != (N,):
        raise InvalidInputError(f"initial victim set must have length {N}")

    trace = PlayTrace()
    seen: dict[bytes, int] = {}
    for k in range(max_rounds):
        x, _, nodes = solve_p1(gc, v, s, options)
        v = jammer_best_response(x, gc)
        rnd = PlayRound(x, v, leader_payoff(x, v, gc), nodes)
        trace.rounds.append(rnd)
        key = rnd.key()
        if key in seen:
            period = k - seen[key]
            if trace.cycle_length is None:
                trace.converged = period == 1
                trace.cycle_length = None if period == 1 else period
            if stop_early:
                break
        seen.setdefault(key, k)
    return trace


def is_mutual_best_response(x: AssociationStrategy, v: JammerStrategy, gc: GameCoefficients,
                            s: Scenario, tol: float = 1e-9) -> bool:
    """True when ``x`` is optimal against ``v`` and ``v`` is the jammer's reply to ``x``."""
    if not np.array_equal(jammer_best_response(x, gc).v, v.v):
        return False
    _, best, _ = solve_p1(gc, v, s)
    return abs(best - leader_payoff(x, v, gc)) <= tol
