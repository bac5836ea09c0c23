"""Jamming-aware gateway association as a Stackelberg game."""

from . import bench, bilp, dynamics, game, model, stackelberg
from .dynamics import PlayTrace, detect_cycle, fictitious_play
from .game import (
    AssociationStrategy,
    CoefficientError,
    GameCoefficients,
    JammerStrategy,
    KnowledgeMode,
    coefficients,
    jammer_best_response,
    jammer_objective,
    jammer_weight,
    leader_payoff,
)
from .model import (
    ChannelParams,
    GenerationConfig,
    InvalidInputError,
    LinkProbabilities,
    Scenario,
    compute_link_probabilities,
    detection_prob,
    generate_scenario,
    jammed_success,
    unjammed_success,
)
from .stackelberg import (
    Equilibrium,
    SolverLimitError,
    brute_force_stackelberg,
    build_ilp_se,
    build_p1,
    jam_free_optimum,
    solve_equilibrium,
    verify_equilibrium,
)

__version__ = "0.1.0"
