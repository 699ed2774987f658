# %% [markdown]
# # Sampler diagnostics
#
# Trace and autocorrelation of the conditional posterior mean of F(1), the
# number of occupied tables and the base scale s.

# %%
from pathlib import Path

import numpy as np

from concavecdf import ChainConfig, PriorConfig, SimConfig, generate, run_chain
from concavecdf.dataio import svg_plot
from concavecdf.evaluation import acf, batch_means_se

OUT = Path(__file__).resolve().parent / "output"
OUT.mkdir(exist_ok=True)

records, _ = generate(SimConfig(n=100, seed=2))
chain = run_chain(records, PriorConfig(), ChainConfig(n_iter=10000, burn_in=5000, seed=2))

# %%
kept = slice(5000, None)
for name, trace in [("F(1)", chain.trace), ("tables", chain.table_counts), ("s", chain.s_trace)]:
    r = acf(trace[kept], 30)
    print(f"{name:7s} mean {trace[kept].mean():.4f}  batch-means SE {batch_means_se(trace[kept]):.4f}"
          f"  r1 {r[1]:.3f}  r10 {r[10]:.3f}  r30 {r[30]:.3f}")
print("truth F(1) =", 1 - np.exp(-1))

# %%
it = np.arange(chain.trace.size, dtype=float)
svg_plot(OUT / "trace.svg", [dict(x=it, y=chain.trace, label="F(1) draw")],
         title="trace of F(1)", xlabel="iteration", ylabel="F(1)")
lags = np.arange(31, dtype=float)
svg_plot(OUT / "acf.svg", [dict(x=lags, y=acf(chain.trace[kept], 30), label="F(1)")],
         title="autocorrelation", xlabel="lag", ylabel="r", ylim=(-0.2, 1))
print("wrote trace.svg, acf.svg")
