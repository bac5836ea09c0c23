# %% [markdown]
# # Jammer strength, network size and gateway layout
#
# A desk-scale version of the simulation study: a lambda sweep for several
# sensor counts, then the four gateway layouts at N = 20. Trial counts are
# small here; the CLI's `--profile full` runs the 100-trial version.

# %%
from pathlib import Path

from jamassoc import bench
from jamassoc.bench import ExperimentSpec
from jamassoc.plot import PlotSpec, emit_plot

out = Path("notebook_out")
out.mkdir(exist_ok=True)

spec = ExperimentSpec.profile("scaling", "quick", trials=5, master_seed=1)
rows, drops = bench.run_sensor_scaling(spec)
bench.write_rows(rows, out / "sweep.csv")
for n, d in drops.items():
    print(f"N={n:3d}: payoff drops {100 * d:5.1f}% from a dormant to a free jammer")

# %% [markdown]
# Larger networks feel the jammer less: once the two gateways are full, a
# jammed sensor can be swapped for an unjammed spare.

# %%
emit_plot(out / "sweep.csv", PlotSpec.for_sweep(), out / "sweep.svg")

# %%
spec = ExperimentSpec.profile("gateways", trials=5, master_seed=1)
rows, gains = bench.run_gateway_comparison(spec)
bench.write_rows(rows, out / "gateways.csv")
for m, g in gains.items():
    print(f"M={m}: best gain over one central gateway {100 * g:5.1f}%")
emit_plot(out / "gateways.csv", PlotSpec.for_gateways(), out / "gateways.svg")
