"""Mixed-case interval-censored data generation.

Each replicate draws a number of inspections ``K``, sorts ``K`` i.i.d.
inspection values, draws the event time ``X`` and records which inspection
interval contains it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .core import CensoredRecord
from .rng import DATA, make_rng

EVENT_LAWS = ("exponential", "halfnormal")
INSPECTION_LAWS = ("gamma", "uniform", "fixed")


@dataclass(frozen=True)
class SimConfig:
    """Simulation settings.

    ``k_fixed`` pins the number of inspections; otherwise ``K`` is uniform on
    ``{1, ..., k_max}``.  ``inspection_params`` depend on the law: ``gamma``
    takes ``(shape, rate)``, ``uniform`` takes ``(low, high)`` and ``fixed``
    takes the inspection times themselves (``k_fixed`` must match).
    """

    n: int = 100
    k_max: int = 20
    k_fixed: int | None = None
    inspection_law: str = "gamma"
    inspection_params: tuple[float, ...] = (2.0, 1.0)
    event_law: str = "exponential"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.k_fixed is not None and self.k_fixed < 1:
            raise ValueError("k_fixed must be >= 1")
        if self.event_law not in EVENT_LAWS:
            raise ValueError(f"unknown event law {self.event_law!r}; choose from {EVENT_LAWS}")
        if self.inspection_law not in INSPECTION_LAWS:
            raise ValueError(
                f"unknown inspection law {self.inspection_law!r}; choose from {INSPECTION_LAWS}")
        params = tuple(float(p) for p in self.inspection_params)
        object.__setattr__(self, "inspection_params", params)
        if self.inspection_law == "gamma":
            if len(params) != 2 or min(params) <= 0:
                raise ValueError("gamma inspection law needs (shape > 0, rate > 0)")
        elif self.inspection_law == "uniform":
            if len(params) != 2 or not 0 <= params[0] < params[1]:
                raise ValueError("uniform inspection law needs 0 <= low < high")
        else:
            if self.k_fixed != len(params):
                raise ValueError("fixed inspection law needs k_fixed == number of times")
            if any(b <= a for a, b in zip(params, params[1:])) or params[0] <= 0:
                raise ValueError("fixed inspection times must be positive and increasing")


def event_cdf(law: str):
    """True distribution function of a named event law (a CDF-like callable)."""
    if law == "exponential":
        return lambda x: -np.expm1(-np.asarray(x, dtype=float))
    if law == "halfnormal":
        return lambda x: stats.halfnorm.cdf(np.asarray(x, dtype=float))
    raise ValueError(f"unknown event law {law!r}")


def event_density(law: str):
    if law == "exponential":
        return lambda x: np.exp(-np.asarray(x, dtype=float))
    if law == "halfnormal":
        return lambda x: stats.halfnorm.pdf(np.asarray(x, dtype=float))
    raise ValueError(f"unknown event law {law!r}")


def inspection_density(config: SimConfig):
    """Density of a single raw (unsorted) inspection draw."""
    if config.inspection_law == "gamma":
        shape, rate = config.inspection_params
        return lambda x: stats.gamma.pdf(x, a=shape, scale=1.0 / rate)
    if config.inspection_law == "uniform":
        lo, hi = config.inspection_params
        return lambda x: stats.uniform.pdf(x, loc=lo, scale=hi - lo)
    raise ValueError("a fixed inspection law has no density")


def draw_k(config: SimConfig, rng: np.random.Generator) -> int:
    if config.k_fixed is not None:
        return config.k_fixed
    return int(rng.integers(1, config.k_max + 1))


def draw_inspections(config: SimConfig, k: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted inspection times; a vector with tied or zero values is redrawn whole."""
    if config.inspection_law == "fixed":
        return np.asarray(config.inspection_params)
    while True:
        if config.inspection_law == "gamma":
            shape, rate = config.inspection_params
            t = np.sort(rng.gamma(shape, 1.0 / rate, size=k))
        else:
            lo, hi = config.inspection_params
            t = np.sort(rng.uniform(lo, hi, size=k))
        if t[0] > 0 and np.all(np.diff(t) > 0):
            return t


def draw_event(law: str, rng: np.random.Generator) -> float:
    if law == "exponential":
        return float(rng.exponential())
    return float(abs(rng.standard_normal()))


def locate(times: np.ndarray, x: float) -> int:
    """1-based index ``j`` with ``t_{j-1} < x <= t_j`` (``t_0 = 0``, ``t_{k+1} = inf``)."""
    return int(np.searchsorted(times, x, side="left")) + 1


def generate(config: SimConfig, replicate: int = 0):
    """Simulate one dataset.

    Returns the records and the latent event times; the latter are only for
    oracle comparisons.  The stream depends on ``(config.seed, replicate)``
    alone.
    """
    rng = make_rng(config.seed, DATA, replicate)
    records, events = [], []
    for _ in range(config.n):
        k = draw_k(config, rng)
        times = draw_inspections(config, k, rng)
        x = draw_event(config.event_law, rng)
        records.append(CensoredRecord(tuple(times), locate(times, x)))
        events.append(x)
    return records, events
