# %% [markdown]
# # Posterior consistency
#
# L1 distance, weighted by the inspection density, between the posterior mean
# and the truth as the sample size grows.  With K uniform on {1..20} and
# i.i.d. Gamma(2, 1) inspections, the expected inspection measure has the
# Gamma(2, 1) density whatever K is.

# %%
import numpy as np
from scipy import stats

from concavecdf import ChainConfig, GridFunction, PriorConfig, SimConfig, generate, run_chain
from concavecdf.core import l1_mu_distance
from concavecdf.simulate import event_cdf

truth = event_cdf("exponential")
xi = stats.gamma(2.0).pdf

for n in (25, 100, 400):
    d, width = [], []
    for seed in range(3):
        records, _ = generate(SimConfig(n=n, seed=seed))
        chain = run_chain(records, PriorConfig(), ChainConfig(n_iter=4000, burn_in=2000, seed=seed))
        d.append(l1_mu_distance(GridFunction(chain.grid, chain.mean_cdf), truth, xi))
        width.append(chain.band_width().mean())
    print(f"n = {n:4d}: mean L1(mu) = {np.mean(d):.4f}  mean band width {np.mean(width):.3f}")
