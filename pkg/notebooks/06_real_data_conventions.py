# %% [markdown]
# # Real-data conventions
#
# No data are bundled.  This walks through the two loading conventions on toy
# files:
#
# * current-status data with a life-span cap: a subject who is negative at
#   inspection age t is recorded as (t, 100] rather than (t, inf);
# * right-censored rows written with right endpoint 100 that mean "never
#   observed", converted to inf with ``treat_as_inf=100``.

# %%
import tempfile
from pathlib import Path

import numpy as np

from concavecdf import concave_mle, npmle
from concavecdf.dataio import load_intervals

tmp = Path(tempfile.mkdtemp())
cap = tmp / "current_status.csv"
cap.write_text("left,right\n0,4.5\n0,12\n7,100\n2,100\n0,30\n15,100\n")
censored = tmp / "right_censored.csv"
censored.write_text("left,right\n4,11\n17,25\n0,5\n30,100\n11,15\n35,100\n")

# %%
capped = load_intervals(cap)  # the cap stays a finite endpoint
print("capped:", [r.interval for r in capped][:3])
fit = concave_mle(capped)
print("concave MLE on capped data, F(100) =", fit.cdf(100.0))

# %%
as_inf = load_intervals(censored, treat_as_inf=100)
print("right-censored rows:", [r.interval for r in as_inf if r.interval.right_censored])
fit = npmle(as_inf)
print("NPMLE survival at 20:", 1 - fit.cdf(20.0), " mass left at +inf:", 1 - fit.cdf.masses.sum())
grid = np.array([5.0, 10.0, 20.0, 40.0])
print("concave MLE survival:", np.round(1 - concave_mle(as_inf).cdf(grid), 3))
