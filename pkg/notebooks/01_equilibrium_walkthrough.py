# %% [markdown]
# # One scenario, start to finish
#
# Twenty sensors, two gateways, one reactive jammer. We look at the link
# probabilities, solve for the equilibrium association and check it.

# %%
import numpy as np

from jamassoc import (
    GenerationConfig,
    compute_link_probabilities,
    generate_scenario,
    jam_free_optimum,
    solve_equilibrium,
    verify_equilibrium,
)
from jamassoc.stackelberg import game_for

s = generate_scenario(GenerationConfig(layout="two-gn", n_sensors=20, lam=0.1), seed=7)
lp = compute_link_probabilities(s)
print("jammer at", s.jam_pos.round(3))
print("mean clear success per gateway", lp.p_clear.mean(axis=0).round(3))
print("sensors the jammer hears with p > 0.5:", int((lp.p_detect > 0.5).sum()))

# %% [markdown]
# The WSN moves first. The jammer then attacks every sensor whose perceived
# loss outweighs the power it would spend. The program below folds that reply
# into a single 0-1 program.

# %%
eq = solve_equilibrium(s)
print("delivered packets per round:", round(eq.leader_payoff, 4))
print("without any jammer:         ", round(jam_free_optimum(s), 4))
print("victims:", np.flatnonzero(eq.v_star.v).tolist())
print("gateway loads:", eq.x_star.x.sum(axis=0).tolist())

# %%
report = verify_equilibrium(eq, game_for(s), s)
for name, check in report.checks.items():
    print(f"{name:14s} {'ok' if check.passed else 'FAILED'}  residual={check.residual:.1e}")

# %% [markdown]
# As the jammer's cost weight grows the victims disappear and the payoff climbs
# back to the jam-free value.

# %%
for lam in (0.0, 0.05, 0.1, 0.2, 0.4, 1.0):
    e = solve_equilibrium(s.with_lambda(lam))
    print(f"lambda={lam:4.2f}  payoff={e.leader_payoff:7.4f}  victims={e.v_star.n_victims}")
