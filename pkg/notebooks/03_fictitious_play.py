# %% [markdown]
# # Alternating best responses
#
# Instead of the WSN anticipating the jammer, both sides keep reacting to the
# other's last move. Sometimes that settles, sometimes it cycles forever.

# %%
from jamassoc import GenerationConfig, fictitious_play, generate_scenario, solve_equilibrium
from jamassoc.dynamics import is_mutual_best_response
from jamassoc.stackelberg import game_for

for seed in range(8):
    s = generate_scenario(GenerationConfig(lam=0.75), seed)
    tr = fictitious_play(s, max_rounds=20)
    se = solve_equilibrium(s).leader_payoff
    state = "fixed point" if tr.converged else f"cycle of {tr.cycle_length}"
    print(f"seed {seed}: {state:12s} after {tr.rounds_run:2d} rounds, "
          f"last payoff {tr.payoffs[-1]:7.4f}, equilibrium {se:7.4f}")

# %% [markdown]
# A fixed point is a pair of mutual best responses, but it need not match the
# Stackelberg payoff: the leader there commits knowing the reply, which
# alternating play never does.

# %%
s = generate_scenario(GenerationConfig(lam=0.75), 1)
tr = fictitious_play(s, max_rounds=20)
last = tr.rounds[-1]
print("mutual best response:", is_mutual_best_response(last.x, last.v, game_for(s), s))
print("payoff by round:", tr.payoffs.round(3).tolist())
