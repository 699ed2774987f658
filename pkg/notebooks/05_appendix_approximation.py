# %% [markdown]
# # Approximating a decreasing density by uniform mixtures
#
# The grid construction F_m (support points i/m) for the standard exponential,
# its sup error on a check grid and the expected Kullback-Leibler contrast under
# the inspection scheme.  For small m the grid stops at m, short of the larger
# inspection times, so the contrast is infinite.

# %%
import numpy as np

from concavecdf.approximation import approximate_density, kl_functional

f0 = lambda x: np.exp(-np.asarray(x, dtype=float))
F0 = lambda x: -np.expm1(-np.asarray(x, dtype=float))
check = np.arange(1, 51) / 10.0
pk = np.full(20, 1 / 20)

for m in (5, 10, 20, 50, 100):
    Fm = approximate_density(f0, F0, m)
    sup = np.max(np.abs(Fm(check) - F0(check)))
    kl = kl_functional(F0, Fm, pk, n_draws=1000, rng=np.random.default_rng(0))
    print(f"m = {m:3d}: atoms {Fm.thetas.size:5d}  sup error {sup:.4f}  KL {kl.value:.2e}")
