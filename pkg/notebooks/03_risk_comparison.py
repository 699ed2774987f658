# %% [markdown]
# # Risk comparison over replicates
#
# Pointwise log mean squared error and integrated squared error of the three
# estimators over R simulated replicates (a desk-scale version of the study;
# raise R and the chain length for smoother curves).

# %%
from pathlib import Path

from concavecdf import (ChainConfig, GridFunction, PriorConfig, SimConfig, concave_mle,
                        generate, npmle, run_chain)
from concavecdf.dataio import svg_plot
from concavecdf.evaluation import DEFAULT_GRID, ise, pointwise_log_mse, summarize_replicates
from concavecdf.simulate import event_cdf

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

R, n, law = 5, 200, "halfnormal"
grid = DEFAULT_GRID
truth = GridFunction(grid, event_cdf(law)(grid))
config = SimConfig(n=n, event_law=law, seed=3)

# %%
fits = {"npmle": [], "cmle": [], "posterior": []}
for rep in range(R):
    records, _ = generate(config, replicate=rep)
    fits["npmle"].append(GridFunction(grid, npmle(records).cdf(grid)))
    fits["cmle"].append(GridFunction(grid, concave_mle(records).cdf(grid)))
    chain = run_chain(records, PriorConfig(),
                      ChainConfig(n_iter=4000, burn_in=2000, grid=grid, seed=3, replicate=rep))
    fits["posterior"].append(GridFunction(grid, chain.mean_cdf))

for name, est in fits.items():
    print(f"{name:10s} mean ISE {summarize_replicates(ise(e, truth) for e in est):.5f}")

# %%
svg_plot(OUT / "log_mse.svg",
         [dict(x=grid, y=pointwise_log_mse(est, truth).values, label=name) for name, est in fits.items()],
         title=f"log MSE, {law} truth, n = {n}, R = {R}", ylabel="log MSE")
print("wrote log_mse.svg")
