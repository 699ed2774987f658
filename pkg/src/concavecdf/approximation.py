"""Constructive approximation of a decreasing density by mixtures of uniforms.

:func:`approximate_density` builds the grid approximation ``F_m`` with
support points ``i/m`` and :func:`kl_functional` estimates the expected
interval-censored Kullback-Leibler contrast between a truth and a candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import MixtureCDF, h_divergence
from .simulate import SimConfig, draw_inspections


def _bisect_level(g: Callable[[float], float], level: float, lo: float, hi: float,
                  xtol: float = 1e-12) -> float:
    # g decreasing with g(lo) >= level > g(hi)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= level:
            lo = mid
        else:
            hi = mid
    return hi


def approximate_density(f0: Callable, F0: Callable, m: int,
                        a1: float | None = None, a2: float | None = None) -> MixtureCDF:
    """Mixture-of-uniforms approximation to the concave CDF with density ``f0``.

    The truncated density ``g = f0 * 1[0, m] / F0(m)`` is replaced by a step
    function on the cells ``((i-1)/m, i/m]``, ``i = 1..m^2``: right-endpoint
    values up to the cell containing the level-``a1`` crossing ``x1``, the
    constant ``a1`` on that cell, left-endpoint values after it.  Its
    uniform-mixture weights are then rescaled on the block of cells between
    the ``a1`` and ``a2`` crossings so the total mass is exactly one.

    ``a1`` and ``a2`` default to ``f0(0)/2`` and ``f0(0)/4``.
    """
    m = int(m)
    if m < 1:
        raise ValueError("m must be a positive integer")
    top = float(f0(0.0))
    a1 = top / 2.0 if a1 is None else float(a1)
    a2 = top / 4.0 if a2 is None else float(a2)
    if not top > a1 > a2 > 0:
        raise ValueError("need f0(0) > a1 > a2 > 0")
    norm = float(F0(m))

    def g(x):
        return float(f0(x)) / norm if 0 <= x <= m else 0.0

    if not (g(0.0) >= a1 and g(float(m)) < a2):
        raise ValueError(f"level crossings of a1={a1}, a2={a2} not found in [0, {m}]")
    x1 = _bisect_level(g, a1, 0.0, float(m))
    x2 = _bisect_level(g, a2, x1, float(m))
    m1 = math.ceil(m * x1) - 1
    m2 = math.ceil(m * x2) - 1
    if m1 < 1:
        raise ValueError("m too small: the a1 crossing falls in the first cell")

    size = m * m
    i = np.arange(1, size + 1)
    gi = np.array([g(v) for v in i / m])
    g_prev = np.concatenate([[g(0.0)], gi[:-1]])
    steps = np.where(i <= m1, gi, g_prev)
    steps[m1] = a1  # cell m1 + 1 (0-based index m1)
    nxt = np.append(steps[1:], 0.0)
    raw = i / m * (steps - nxt)

    block = slice(m1 - 1, m2)  # 1-based cells m1..m2
    outside = raw[: m1 - 1].sum() + raw[m2:].sum()
    inside = raw[block].sum()
    weights = raw.copy()
    weights[block] *= (1.0 - outside) / inside
    if np.any(weights < 0):
        raise ValueError(f"m too small: negative mixture weight for m={m}")
    return MixtureCDF(i / m, weights / weights.sum())


@dataclass(frozen=True)
class KLEstimate:
    value: float
    std_error: float
    tail_mass: float
    n_draws: int


def kl_functional(F0, F, k_weights, inspection: SimConfig | None = None,
                  n_draws: int = 2000, rng: np.random.Generator | None = None) -> KLEstimate:
    """Monte Carlo mean over ``(K, T)`` of ``h_divergence(F0, F0, F, T)``.

    ``k_weights[k-1]`` is ``p_K(k)`` for ``k = 1..k_max``; mass missing from
    the truncation is reported as ``tail_mass`` and the rest renormalized.
    Inspection times follow ``inspection`` (default sorted Gamma(2, 1)).
    """
    pk = np.asarray(k_weights, dtype=float)
    if pk.ndim != 1 or pk.size == 0 or np.any(pk < 0) or pk.sum() <= 0:
        raise ValueError("k_weights must be a nonnegative, nonzero 1-d array")
    tail = max(0.0, 1.0 - pk.sum())
    pk = pk / pk.sum()
    inspection = SimConfig() if inspection is None else inspection
    rng = np.random.default_rng(0) if rng is None else rng
    values = np.empty(n_draws)
    for d in range(n_draws):
        k = int(rng.choice(pk.size, p=pk)) + 1
        values[d] = h_divergence(F0, F0, F, draw_inspections(inspection, k, rng))
        if math.isinf(values[d]):
            return KLEstimate(math.inf, math.nan, tail, d + 1)
    return KLEstimate(float(values.mean()), float(values.std(ddof=1) / math.sqrt(n_draws)),
                      tail, n_draws)
