"""Censored-data containers, concave distribution functions and distances.

A *CDF-like* object is any callable mapping an array of points in
``[0, inf]`` to distribution-function values.  All evaluation in this module
goes through :func:`evaluate`, which pins ``F(inf) = 1`` and ``F(0) = 0``
regardless of the callable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

#: Masses below this are treated as exactly zero in log-likelihoods.
MASS_FLOOR = 1e-300


class InvariantError(ValueError):
    """Raised when a container or sampler state violates its invariants."""


def evaluate(F: Callable, x) -> np.ndarray:
    """Evaluate a CDF-like callable with ``F(inf) = 1`` and ``F(0) = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape, dtype=float)
    inf = np.isinf(x)
    zero = x <= 0.0
    mid = ~(inf | zero)
    if np.any(mid):
        out[mid] = np.asarray(F(x[mid]), dtype=float)
    out[inf] = 1.0
    out[zero] = 0.0
    return out


@dataclass(frozen=True)
class Interval:
    """Half-open censoring interval ``(left, right]``; ``right`` may be ``inf``."""

    left: float
    right: float

    def __post_init__(self):
        if not self.left >= 0.0 or math.isinf(self.left):
            raise InvariantError(f"left endpoint must be finite and >= 0, got {self.left}")
        if not self.right > self.left:
            raise InvariantError(f"need left < right, got ({self.left}, {self.right}]")

    @property
    def right_censored(self) -> bool:
        return math.isinf(self.right)


@dataclass(frozen=True)
class CensoredRecord:
    """One mixed-case observation.

    ``times`` are the ``k`` strictly increasing inspection times and
    ``delta_index`` (1-based, in ``1..k+1``) flags the inspection interval
    ``(t_{j-1}, t_j]`` holding the event, with ``t_0 = 0`` and
    ``t_{k+1} = inf``.
    """

    times: tuple[float, ...]
    delta_index: int

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if len(times) < 1:
            raise InvariantError("a record needs at least one inspection time")
        for t in times:
            if not (t > 0.0 and math.isfinite(t)):
                raise InvariantError(f"inspection times must be finite and > 0, got {t}")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvariantError(f"inspection times must be strictly increasing: {times}")
        if not 1 <= int(self.delta_index) <= len(times) + 1:
            raise InvariantError(
                f"delta_index {self.delta_index} outside 1..{len(times) + 1}")
        object.__setattr__(self, "delta_index", int(self.delta_index))

    @property
    def k(self) -> int:
        return len(self.times)

    @property
    def delta(self) -> tuple[int, ...]:
        """Indicator vector of length ``k + 1`` with a single one."""
        return tuple(int(j == self.delta_index) for j in range(1, self.k + 2))

    @property
    def interval(self) -> Interval:
        j = self.delta_index
        left = 0.0 if j == 1 else self.times[j - 2]
        right = math.inf if j == self.k + 1 else self.times[j - 1]
        return Interval(left, right)

    @property
    def cut_points(self) -> np.ndarray:
        """``(0, t_1, ..., t_k, inf)``."""
        return np.concatenate([[0.0], self.times, [math.inf]])

    @classmethod
    def from_interval(cls, left: float, right: float) -> "CensoredRecord":
        """Smallest record whose censoring interval is ``(left, right]``.

        The finite, positive endpoints become the inspection times.
        """
        Interval(left, right)
        times = [t for t in (left, right) if 0.0 < t < math.inf]
        if not times:
            raise InvariantError("interval (0, inf] carries no inspection time")
        delta_index = 1 if left == 0.0 else 2
        return cls(tuple(times), delta_index)


def interval_bounds(data) -> tuple[np.ndarray, np.ndarray]:
    """Left and right censoring endpoints as two float arrays.

    Accepts records, :class:`Interval` objects, or an already split
    ``(left, right)`` pair of arrays (returned unchanged).
    """
    if isinstance(data, tuple) and len(data) == 2 and isinstance(data[0], np.ndarray):
        return data
    left, right = [], []
    for rec in data:
        iv = rec.interval if isinstance(rec, CensoredRecord) else rec
        left.append(iv.left)
        right.append(iv.right)
    return np.asarray(left, dtype=float), np.asarray(right, dtype=float)


def psi(x, theta):
    """Uniform-on-``[0, theta]`` distribution function ``min(x, theta) / theta``."""
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(theta <= 0):
        raise ValueError("theta must be positive")
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    out = np.minimum(x, theta) / theta
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class MixtureCDF:
    """Concave distribution function as a finite mixture of uniform CDFs.

    ``F(x) = sum_j weights[j] * min(x, thetas[j]) / thetas[j]``.  Equal
    thetas are merged at construction, so two instances describing the same
    mixing distribution compare equal.
    """

    thetas: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        thetas = np.atleast_1d(np.asarray(self.thetas, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if thetas.shape != weights.shape or thetas.ndim != 1 or thetas.size == 0:
            raise InvariantError("thetas and weights must be equal-length 1-d arrays")
        if np.any(~np.isfinite(thetas)) or np.any(thetas <= 0):
            raise InvariantError("thetas must be finite and positive")
        if np.any(weights < 0):
            raise InvariantError("weights must be nonnegative")
        total = weights.sum()
        if abs(total - 1.0) > 1e-9:
            raise InvariantError(f"weights sum to {total}, not 1")
        uniq, inv = np.unique(thetas, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inv, weights)
        object.__setattr__(self, "thetas", uniq)
        object.__setattr__(self, "weights", merged / merged.sum())

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        flat = np.minimum(x.reshape(-1, 1), self.thetas) / self.thetas
        out = np.where(np.isinf(x).reshape(-1, 1), 1.0, flat) @ self.weights
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def density(self, x):
        """Nonincreasing density ``sum_j w_j / theta_j * 1{x <= theta_j}``."""
        x = np.asarray(x, dtype=float)
        out = ((x.reshape(-1, 1) <= self.thetas) / self.thetas) @ self.weights
        return out.reshape(x.shape) if x.ndim else float(out[0])

    def __eq__(self, other):
        if not isinstance(other, MixtureCDF):
            return NotImplemented
        return (np.array_equal(self.thetas, other.thetas)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    @classmethod
    def uniform(cls, upper: float) -> "MixtureCDF":
        return cls(np.array([upper]), np.array([1.0]))


@dataclass(frozen=True, eq=False)
class StepCDF:
    """Right-continuous step distribution function.

    Mass not placed at a finite jump sits at ``+inf``.
    """

    jump_locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.atleast_1d(np.asarray(self.jump_locations, dtype=float))
        mass = np.atleast_1d(np.asarray(self.masses, dtype=float))
        if loc.shape != mass.shape or loc.ndim != 1:
            raise InvariantError("jump_locations and masses must be equal-length 1-d arrays")
        if np.any(np.diff(loc) <= 0):
            raise InvariantError("jump locations must be strictly increasing")
        if np.any(mass <= 0):
            raise InvariantError("masses must be positive")
        if mass.sum() > 1.0 + 1e-9:
            raise InvariantError(f"masses sum to {mass.sum()} > 1")
        object.__setattr__(self, "jump_locations", loc)
        object.__setattr__(self, "masses", mass)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        out = np.minimum(cum[np.searchsorted(self.jump_locations, x, side="right")], 1.0)
        out = np.where(np.isinf(x), 1.0, out)
        return out if x.ndim else float(out)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values of a function tabulated on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise InvariantError("grid and values must be equal-length 1-d arrays")
        if np.any(np.diff(grid) <= 0):
            raise InvariantError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.size

    def __call__(self, x):
        """Linear interpolation through ``(0, 0)`` and the grid; constant beyond the last point."""
        x = np.asarray(x, dtype=float)
        if self.grid[0] > 0:
            xp, fp = np.append(0.0, self.grid), np.append(0.0, self.values)
        else:
            xp, fp = self.grid, self.values
        out = np.interp(x, xp, fp)
        return out if x.ndim else float(out)


def cdf_eval(F, x):
    """Evaluate ``F`` at ``x`` (scalar or array) with ``F(inf) = 1``."""
    out = evaluate(F, x)
    return float(out) if out.ndim == 0 else out


def interval_mass(F, interval: Interval) -> float:
    """Probability ``F(right) - F(left)`` of the interval, clamped to ``[0, 1]``."""
    lo, hi = evaluate(F, [interval.left, interval.right])
    return float(min(max(hi - lo, 0.0), 1.0))


def interval_masses(F, left, right) -> np.ndarray:
    """Vectorised :func:`interval_mass` over endpoint arrays."""
    return np.clip(evaluate(F, right) - evaluate(F, left), 0.0, 1.0)


def conditional_log_likelihood(F, data) -> float:
    """Log-likelihood of ``F`` given the inspection times.

    Only the factors that depend on ``F`` are kept; the inspection-count and
    inspection-time densities are constant in ``F`` and dropped.  Returns
    ``-inf`` if some observed interval has (numerically) zero mass.
    """
    left, right = interval_bounds(data)
    if left.size == 0:
        raise ValueError("data must be nonempty")
    mass = interval_masses(F, left, right)
    if np.any(mass < MASS_FLOOR):
        return -math.inf
    return float(np.sum(np.log(mass)))


def _increments(F, rec: CensoredRecord) -> np.ndarray:
    return np.diff(evaluate(F, rec.cut_points))


def distance_dn(F, G, data: Sequence[CensoredRecord]) -> float:
    """Average over records of the L1 distance between inspection-interval increments.

    Includes the final interval ``(t_k, inf)``.
    """
    if len(data) == 0:
        raise ValueError("data must be nonempty")
    total = sum(np.abs(_increments(F, r) - _increments(G, r)).sum() for r in data)
    return float(total / len(data))


def distance_dn_prime(F, G, data: Sequence[CensoredRecord]) -> float:
    """Average over records of ``mean_j |F(t_j) - G(t_j)|`` at the inspection times."""
    if len(data) == 0:
        raise ValueError("data must be nonempty")
    total = 0.0
    for r in data:
        t = np.asarray(r.times)
        total += np.abs(evaluate(F, t) - evaluate(G, t)).mean()
    return float(total / len(data))


@dataclass(frozen=True)
class Quadrature:
    """Uniform composite-trapezoid grid on ``[lower, upper]``."""

    lower: float = 0.0
    upper: float = 8.0
    n_points: int = 4001

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("quadrature range must be finite")
        if not (0.0 <= self.lower < self.upper):
            raise ValueError("need 0 <= lower < upper")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError("n_points must be an integer >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, int(self.n_points))


def l1_mu_distance(F, G, xi: Callable, quadrature: Quadrature | None = None) -> float:
    """``integral |F - G| xi dx`` by the composite trapezoid rule."""
    quadrature = Quadrature() if quadrature is None else quadrature
    x = quadrature.nodes
    integrand = np.abs(evaluate(F, x) - evaluate(G, x)) * np.asarray(xi(x), dtype=float)
    return float(np.trapezoid(integrand, x))


def h_divergence(F0, F1, F2, times: Iterable[float]) -> float:
    """Kullback-Leibler-type contrast of ``F1`` against ``F2`` under ``F0``.

    Sums ``p0_j log(p1_j / p2_j)`` over the ``k + 1`` intervals cut by
    ``times``, where ``p*_j`` are interval masses.  Terms with ``p0_j = 0``
    vanish.  A zero ``p2_j`` under positive ``p0_j`` gives ``+inf``; a zero
    ``p1_j`` there (outside the intended domain) gives ``-inf``.
    """
    cuts = np.concatenate([[0.0], np.asarray(list(times), dtype=float), [math.inf]])
    p0 = np.clip(np.diff(evaluate(F0, cuts)), 0.0, None)
    p1 = np.clip(np.diff(evaluate(F1, cuts)), 0.0, None)
    p2 = np.clip(np.diff(evaluate(F2, cuts)), 0.0, None)
    live = p0 > 0
    if np.any(p2[live] < MASS_FLOOR):
        return math.inf
    if np.any(p1[live] < MASS_FLOOR):
        return -math.inf
    return float(np.sum(p0[live] * (np.log(p1[live]) - np.log(p2[live]))))
