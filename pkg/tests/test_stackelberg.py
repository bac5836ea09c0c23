import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from jamassoc import bilp
from jamassoc.game import CoefficientError, KnowledgeMode, jammer_best_response
from jamassoc.model import GenerationConfig, Scenario, generate_scenario
from jamassoc.stackelberg import (
    Equilibrium,
    SolverLimitError,
    brute_force_stackelberg,
    build_ilp_se,
    build_p1,
    equilibrium_from_coefficients,
    game_for,
    jam_free_optimum,
    solve_equilibrium,
    verify_equilibrium,
)

from conftest import small_scenario


def tiny():
    return Scenario(sn_pos=[(0.2, 0.5), (0.8, 0.4)], gn_pos=[(0.5, 0.5)], jam_pos=(0.3, 0.6),
                    gn_capacity=[2])


def test_p1_shape():
    s = tiny()
    p = build_p1(game_for(s), np.zeros(2), s)
    assert p.num_vars == 3
    assert p.num_constraints == 6
    assert p.objective[:2].tolist() == game_for(s).b.ravel().tolist()


def test_p1_jammed_objective():
    s = tiny()
    gc = game_for(s)
    p = build_p1(gc, [1, 0], s)
    assert p.objective[0] == pytest.approx(gc.a[0, 0] + gc.b[0, 0])
    assert p.objective[1] == gc.b[1, 0]


def test_ilp_se_shape():
    s = tiny()
    p = build_ilp_se(game_for(s), s)
    assert p.num_vars == 7
    assert p.num_constraints == 12
    assert p.var_names[:3] == ["x_0_0", "x_1_0", "y_0"]


def test_zero_budget_starves_gateways():
    s = small_scenario(1, 3, 2, budget=0.0)
    eq = solve_equilibrium(s)
    assert eq.leader_payoff == 0.0
    assert not eq.x_star.x.any() and not eq.x_star.y.any()
    p1 = bilp.solve(build_p1(game_for(s), np.zeros(3), s))
    assert p1.objective_value == 0.0
    assert brute_force_stackelberg(game_for(s), s).leader_payoff == 0.0


def test_single_sensor_two_choices():
    s = Scenario(sn_pos=[(0.4, 0.5)], gn_pos=[(0.5, 0.5)], jam_pos=(0.9, 0.9), gn_capacity=[1])
    gc = game_for(s)
    eq = brute_force_stackelberg(gc, s)
    v = jammer_best_response(np.ones((1, 1)), gc).v[0]
    assert eq.leader_payoff == pytest.approx(gc.a[0, 0] * v + gc.b[0, 0])
    assert eq.x_star.x.tolist() == [[1]]


def test_huge_lambda_equals_jam_free():
    s = small_scenario(4, 4, 2, lam=10.0)
    eq = solve_equilibrium(s)
    assert eq.v_star.n_victims == 0
    assert eq.leader_payoff == pytest.approx(jam_free_optimum(s), abs=1e-12)


def test_undetectable_jammer_decouples():
    s = Scenario(sn_pos=[(0.2, 0.3), (0.7, 0.8), (0.4, 0.4)], gn_pos=[(0.25, 0.5), (0.75, 0.5)],
                 jam_pos=(1e4, 1e4), unit_square=False, lam=0.0)
    gc = game_for(s)
    assert np.all(gc.a == 0)
    eq = solve_equilibrium(s)
    assert eq.leader_payoff == pytest.approx(jam_free_optimum(s), abs=1e-12)
    assert verify_equilibrium(eq, gc, s).passed


def test_rejects_unclamped_positive_a():
    s = Scenario(sn_pos=[(0.0, 0.0)], gn_pos=[(0.1, 0.0)], jam_pos=(1.0, 1.0))
    with pytest.raises(CoefficientError):
        solve_equilibrium(s, clamp=False)


@pytest.mark.parametrize("mode", list(KnowledgeMode))
def test_matches_bilevel_oracle(mode):
    for seed in range(40):
        n, m = 2 + seed % 3, 1 + seed % 2
        s = small_scenario(seed, n, m)
        gc = game_for(s, mode)
        eq = equilibrium_from_coefficients(gc, s)
        ref = brute_force_stackelberg(gc, s)
        assert eq.leader_payoff == pytest.approx(ref.leader_payoff, abs=1e-9)
        assert eq.x_star.x.tolist() == ref.x_star.x.tolist()
        assert verify_equilibrium(eq, gc, s).passed


@given(st.integers(0, 2**31 - 1), st.integers(1, 5), st.sampled_from([1, 2]))
def test_property_oracle_equivalence(seed, n, m):
    if n * m + m > 14:
        n = 14 // m - 1
    s = small_scenario(seed, n, m)
    gc = game_for(s)
    eq = equilibrium_from_coefficients(gc, s)
    assert eq.leader_payoff == pytest.approx(brute_force_stackelberg(gc, s).leader_payoff,
                                             abs=1e-9)


def test_ilp_optimum_is_the_bilevel_value():
    """Whole-program brute force over (x, y, v, z) agrees with the bilevel enumeration."""
    for seed in range(10):
        s = small_scenario(seed, 2, 2 if seed % 2 else 1)
        gc = game_for(s)
        p = build_ilp_se(gc, s)
        sol = bilp.solve_brute_force(p)
        assert sol.objective_value == pytest.approx(
            brute_force_stackelberg(gc, s).leader_payoff, abs=1e-9)


def test_half_coefficients_scaling_keeps_feasible_set():
    s = small_scenario(3, 2, 1)
    p = build_ilp_se(game_for(s), s)
    scaled = bilp.BinaryProgram(p.num_vars, p.objective)
    for con in p.constraints:
        k = 2.0 if any(abs(a) == 0.5 for a in con.coeffs.values()) else 1.0
        scaled.add({j: k * a for j, a in con.coeffs.items()}, con.sense, k * con.rhs)
    for x in itertools.product((0, 1), repeat=p.num_vars):
        assert p.is_feasible(np.array(x)) == scaled.is_feasible(np.array(x))


@pytest.mark.parametrize("seed", range(6))
def test_linearization_faithful(seed):
    s = generate_scenario(GenerationConfig(lam=0.1 * seed), seed)
    gc = game_for(s)
    eq = solve_equilibrium(s)
    assert np.array_equal(eq.z_star, eq.v_star.v[:, None] * eq.x_star.x)
    ilp_v = np.array(eq.solver_stats["ilp_v"])
    ilp_z = np.array(eq.solver_stats["ilp_z"])
    # the program may leave v free where it cannot move the objective
    matters = ((gc.a * eq.x_star.x) != 0).any(axis=1)
    score = (gc.delta_tilde * eq.x_star.x).sum(1) + gc.lam * gc.rho
    strict = matters & (np.abs(score) > 1e-12)
    assert np.array_equal(ilp_v[strict], eq.v_star.v[strict])
    assert (gc.a * ilp_z).sum() == pytest.approx((gc.a * eq.z_star).sum(), abs=1e-12)


def test_verification_negative_controls():
    s = generate_scenario(GenerationConfig(lam=0.1), 5)
    gc = game_for(s)
    eq = solve_equilibrium(s)
    assert verify_equilibrium(eq, gc, s).passed

    z = eq.z_star.copy()
    n, m = np.argwhere(eq.x_star.x == 1)[0]
    z[n, m] = 1 - z[n, m]
    bad = Equilibrium(eq.x_star, eq.v_star, z, eq.leader_payoff, eq.jammer_objective)
    assert verify_equilibrium(bad, gc, s).failures() == ["linearization"]

    score = (gc.delta_tilde * eq.x_star.x).sum(1) + gc.lam * gc.rho
    k = int(np.flatnonzero(np.abs(score) > 1e-6)[0])
    v = eq.v_star.v.copy()
    v[k] = 1 - v[k]
    from jamassoc.game import JammerStrategy
    bad = Equilibrium(eq.x_star, JammerStrategy(v), v[:, None] * eq.x_star.x,
                      eq.leader_payoff, eq.jammer_objective)
    assert "best_response" in verify_equilibrium(bad, gc, s).failures()

    bad = Equilibrium(eq.x_star, eq.v_star, eq.z_star, eq.leader_payoff + 0.1,
                      eq.jammer_objective)
    assert verify_equilibrium(bad, gc, s).failures() == ["payoff"]


def test_verification_catches_capacity_violation():
    s = small_scenario(0, 4, 1, capacity=1, budget=1.0)
    gc = game_for(s)
    from jamassoc.game import AssociationStrategy
    x = AssociationStrategy(np.ones((4, 1)), [1])
    v = jammer_best_response(x, gc)
    from jamassoc.game import jammer_objective, leader_payoff
    eq = Equilibrium(x, v, v.v[:, None] * x.x, leader_payoff(x, v, gc),
                     jammer_objective(v, x, gc))
    rep = verify_equilibrium(eq, gc, s)
    assert rep.failures() == ["constraints"]
    assert rep.checks["constraints"].residual == 3.0


def test_lambda_and_budget_monotone():
    s = generate_scenario(GenerationConfig(), 11)
    pays = [solve_equilibrium(s.with_lambda(l)).leader_payoff for l in (0, 0.1, 0.3, 0.6, 1)]
    assert np.all(np.diff(pays) >= -1e-9)
    assert pays[-1] <= jam_free_optimum(s) + 1e-9
    pays = [solve_equilibrium(s.with_budget(b).with_lambda(0.1)).leader_payoff
            for b in (0, 1, 2)]
    assert np.all(np.diff(pays) >= -1e-9)


def test_node_limit_raises():
    s = generate_scenario(GenerationConfig(), 0)
    with pytest.raises(SolverLimitError):
        solve_equilibrium(s, options=bilp.SolverOptions(node_limit=0))


def test_equilibrium_json():
    s = small_scenario(2, 3, 2)
    doc = solve_equilibrium(s).to_dict()
    back = json.loads(json.dumps(doc))
    assert set(back) >= {"x", "y", "v", "z", "leader_payoff", "jammer_objective", "solver_stats"}


def test_oracle_refuses_large():
    s = generate_scenario(GenerationConfig(), 0)
    with pytest.raises(bilp.ProgramTooLargeError):
        brute_force_stackelberg(game_for(s), s)


@pytest.mark.parametrize("mode", list(KnowledgeMode))
def test_integer_activation_row_same_binary_points(mode):
    for seed in range(6):
        s = small_scenario(seed, 2, 1 + seed % 2, lam=[0.0, 0.1, 0.3][seed % 3])
        gc = game_for(s, mode)
        a = build_ilp_se(gc, s)
        b = build_ilp_se(gc, s, literal_activation=True)
        assert a.num_constraints == b.num_constraints
        for x in itertools.product((0, 1), repeat=a.num_vars):
            x = np.array(x)
            assert a.is_feasible(x) == b.is_feasible(x)


def test_tiny_threshold_still_jams():
    # the jammer barely perceives this link, yet at lambda = 0 it still jams
    from jamassoc.game import GameCoefficients
    s = Scenario(sn_pos=[(0.4, 0.5)], gn_pos=[(0.5, 0.5)], jam_pos=(0.9, 0.9))
    gc = GameCoefficients(np.array([[-0.3]]), np.array([[0.7]]), np.array([[-1e-10]]),
                          np.array([0.5]), 0.0, KnowledgeMode.LEARNED)
    eq = equilibrium_from_coefficients(gc, s)
    assert eq.v_star.v.tolist() == [1]
    assert eq.leader_payoff == pytest.approx(0.4)
    assert eq.leader_payoff == pytest.approx(brute_force_stackelberg(gc, s).leader_payoff)
    # the raw row is within the feasibility tolerance of v = 0
    raw = bilp.solve(build_ilp_se(gc, s, literal_activation=True))
    assert raw.objective_value == pytest.approx(0.7)
