"""Risk metrics across simulation replicates and chain diagnostics."""

from __future__ import annotations

import numpy as np

from .core import GridFunction

#: Evaluation grid ``{0.01, 0.02, ..., 8.00}``.
DEFAULT_GRID = np.arange(1, 801) / 100.0


def _check_grids(truth: GridFunction, *estimates: GridFunction):
    for est in estimates:
        if est.grid.shape != truth.grid.shape or not np.array_equal(est.grid, truth.grid):
            raise ValueError("estimate and truth grids differ")


def pointwise_log_mse(estimates, truth: GridFunction) -> GridFunction:
    """``log mean_k (F_k(t) - F(t))^2`` at every grid point; ``-inf`` where all errors vanish."""
    estimates = list(estimates)
    if not estimates:
        raise ValueError("need at least one replicate")
    _check_grids(truth, *estimates)
    err = np.array([e.values - truth.values for e in estimates])
    with np.errstate(divide="ignore"):
        return GridFunction(truth.grid, np.log(np.mean(err ** 2, axis=0)))


def ise(estimate: GridFunction, truth: GridFunction) -> float:
    """Grid-average squared error ``(1/m) sum_j (F_hat(t_j) - F(t_j))^2``."""
    _check_grids(truth, estimate)
    return float(np.mean((estimate.values - truth.values) ** 2))


def summarize_replicates(per_replicate_ise) -> float:
    values = np.asarray(list(per_replicate_ise), dtype=float)
    if values.size == 0:
        raise ValueError("no replicates to summarize")
    return float(values.mean())


def acf(trace, max_lag: int) -> np.ndarray:
    """Sample autocorrelations ``r_0 .. r_max_lag`` (biased estimator, ``r_0 = 1``)."""
    x = np.asarray(trace, dtype=float)
    n = x.size
    if max_lag < 0 or n <= max_lag:
        raise ValueError("trace length must exceed max_lag")
    x = x - x.mean()
    var = np.dot(x, x) / n
    if var == 0:
        raise ValueError("autocorrelation undefined for a constant trace")
    return np.array([np.dot(x[:n - k], x[k:]) / n / var for k in range(max_lag + 1)])


def batch_means_se(trace, n_batches: int = 50) -> float:
    """Monte Carlo standard error of a chain mean by non-overlapping batch means."""
    x = np.asarray(trace, dtype=float)
    size = x.size // n_batches
    if size < 1:
        raise ValueError("trace too short for the requested number of batches")
    means = x[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))
