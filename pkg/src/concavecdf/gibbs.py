"""Gibbs sampler for a Dirichlet-process mixture of uniforms under interval censoring.

The mixing measure is a Dirichlet process with concentration ``alpha`` and
base measure ``Par(s, 1)`` (density ``s / theta**2`` on ``theta >= s``), with
a ``Gamma(base_shape, base_rate)`` hyperprior on ``s``.  Exact event times are
latent and imputed inside their censoring intervals, so one sweep is

1. reseat every observation (Chinese restaurant process with explicit table
   parameters and a closed-form new-table marginal),
2. redraw each table's upper endpoint from its Pareto full conditional,
3. redraw ``s`` from its truncated-Gamma full conditional,
4. redraw each latent event time uniformly on
   ``(L_i, min(R_i, theta_{z_i})]``.

``s`` is updated before the latent times so that step 4 always sees a
consistent ``(theta, s)`` pair; any fixed order is a valid Gibbs scan.

Table labels are 0-based and kept contiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numba
import numpy as np
from scipy import optimize, special

from .core import GridFunction, InvariantError, interval_bounds
from .rng import CHAIN, make_rng


@dataclass(frozen=True)
class PriorConfig:
    alpha: float = 1.0
    base_shape: float = 2.0
    base_rate: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not (self.base_shape > 0 and self.base_rate > 0):
            raise ValueError("hyperprior shape and rate must be positive")


@dataclass(frozen=True)
class ChainConfig:
    n_iter: int = 30000
    burn_in: int = 15000
    grid: np.ndarray = field(default_factory=lambda: np.arange(1, 801) / 100.0)
    thin: int = 10
    seed: int = 0
    replicate: int = 0
    record_trace_at: float = 1.0
    quantiles: tuple[float, float] = (0.025, 0.975)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        object.__setattr__(self, "grid", grid)
        if not 0 <= self.burn_in < self.n_iter:
            raise ValueError("need 0 <= burn_in < n_iter")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be a nonempty strictly increasing 1-d array")
        if np.any(grid < 0):
            raise ValueError("grid must be nonnegative")
        lo, hi = self.quantiles
        if not 0 <= lo < hi <= 1:
            raise ValueError("quantiles must satisfy 0 <= lower < upper <= 1")


@dataclass(frozen=True, eq=False)
class GibbsState:
    """Sampler state: seating ``z``, table endpoints ``thetas``, latent times ``x``, base scale ``s``."""

    z: np.ndarray
    thetas: np.ndarray
    x: np.ndarray
    s: float

    @property
    def n_tables(self) -> int:
        return self.thetas.size

    def table_sizes(self) -> np.ndarray:
        return np.bincount(self.z, minlength=self.n_tables)

    def check(self, left=None, right=None):
        """Raise :class:`InvariantError` unless the state is feasible."""
        m = self.n_tables
        if m and (self.z.min() < 0 or self.z.max() >= m):
            raise InvariantError("seating labels out of range")
        if self.z.size and np.any(self.table_sizes() == 0):
            raise InvariantError("empty table present")
        if self.z.size == 0 and m:
            raise InvariantError("tables present without observations")
        if not (self.s > 0 and (m == 0 or self.s <= self.thetas.min())):
            raise InvariantError(f"s={self.s} not in (0, min theta]")
        if self.z.size and np.any(self.x > self.thetas[self.z]):
            raise InvariantError("latent time exceeds its table endpoint")
        if left is not None:
            if np.any(self.x <= left) or np.any(self.x > right):
                raise InvariantError("latent time outside its censoring interval")


def new_table_marginal(x, s):
    """``integral phi(x | theta) dPar(theta; s, 1) = s / (2 max(s, x)^2)``."""
    x = np.asarray(x, dtype=float)
    out = s / (2.0 * np.maximum(s, x) ** 2)
    return float(out) if out.ndim == 0 else out


def prior_mean_cdf(x, s):
    """Base-measure mixture CDF: ``x/(2s)`` for ``x <= s``, ``1 - s/(2x)`` beyond."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(x <= s, x / (2.0 * s), 1.0 - s / (2.0 * np.maximum(x, s)))
    return float(out) if out.ndim == 0 else out


def sample_pareto(lower, shape, u):
    """Inverse-CDF Pareto draw from ``u`` in ``[0, 1)``: ``lower * (1 - u)^(-1/shape)``."""
    return lower * (1.0 - u) ** (-1.0 / shape)


def _log_reg_lower_gamma(a: float, y: float) -> float:
    # Series for log P(a, y); used only where P underflows, i.e. y well below a.
    term, total, k = 1.0, 1.0, 1
    while True:
        term *= y / (a + k)
        total += term
        if term < 1e-17 * total or k > 10000:
            break
        k += 1
    return a * math.log(y) - y - math.lgamma(a + 1.0) + math.log(total)


def sample_truncated_gamma(shape: float, rate: float, upper: float,
                           rng: np.random.Generator) -> float:
    """Draw from ``Gamma(shape, rate)`` restricted to ``(0, upper]``.

    Inverse CDF on the regularized lower incomplete gamma function.  When
    ``upper`` lies beyond the 0.9999 quantile, rejection from the untruncated
    law is cheaper.  When the truncated mass underflows, the inversion is done
    on the log scale.
    """
    if not upper > 0:
        raise InvariantError("truncation point must be positive")
    y_up = rate * upper
    if math.isinf(y_up) or special.gammaincc(shape, y_up) < 1e-4:
        while True:
            s = rng.gamma(shape) / rate
            if s <= upper:
                return float(s)
    u = 1.0 - rng.random()
    p_up = special.gammainc(shape, y_up)
    if p_up > 1e-280:
        y = special.gammaincinv(shape, u * p_up)
        if y > 0:
            return float(min(y, y_up) / rate)
    target = math.log(u) + _log_reg_lower_gamma(shape, y_up)
    if target >= _log_reg_lower_gamma(shape, y_up) - 1e-15:
        return float(upper)
    y = optimize.brentq(lambda v: _log_reg_lower_gamma(shape, v) - target,
                        y_up * 1e-300 ** (1.0 / shape), y_up, xtol=1e-14 * y_up, rtol=1e-14)
    return float(y / rate)


@numba.njit(cache=True)
def _reseat(z, thetas, counts, m, x, s, alpha, u_pick, u_new):
    n = x.shape[0]
    weights = np.empty(n + 1)
    for i in range(n):
        c = z[i]
        counts[c] -= 1
        if counts[c] == 0:
            last = m - 1
            if c != last:
                thetas[c] = thetas[last]
                counts[c] = counts[last]
                for j in range(n):
                    if z[j] == last:
                        z[j] = c
            m -= 1
        xi = x[i]
        total = 0.0
        for c in range(m):
            w = counts[c] / thetas[c] if xi <= thetas[c] else 0.0
            weights[c] = w
            total += w
        b = s if s > xi else xi
        w_new = alpha * s / (2.0 * b * b)
        weights[m] = w_new
        total += w_new
        target = u_pick[i] * total
        pick = m
        acc = 0.0
        for c in range(m + 1):
            acc += weights[c]
            if target < acc and weights[c] > 0.0:
                pick = c
                break
        if pick == m:
            thetas[m] = b * (1.0 - u_new[i]) ** (-0.5)
            counts[m] = 1
            m += 1
        else:
            counts[pick] += 1
        z[i] = pick
    return m


@numba.njit(cache=True)
def _table_max(z, x, m):
    out = np.zeros(m)
    for i in range(x.shape[0]):
        if x[i] > out[z[i]]:
            out[z[i]] = x[i]
    return out


@numba.njit(cache=True)
def _impute(z, thetas, left, right, u):
    n = left.shape[0]
    x = np.empty(n)
    for i in range(n):
        hi = thetas[z[i]]
        if right[i] < hi:
            hi = right[i]
        if not hi > left[i]:
            return x, i
        v = left[i] + (hi - left[i]) * (1.0 - u[i])
        if v <= left[i]:
            v = np.nextafter(left[i], np.inf)
        x[i] = v
    return x, -1


def init_state(data, prior: PriorConfig | None = None) -> GibbsState:
    """Feasible starting point with everyone at a single table.

    Latent times start at interval midpoints (``L + 1`` when right-censored),
    the table endpoint at ``max x + 1`` and ``s`` at ``min(1, theta / 2)``.
    """
    left, right = interval_bounds(data)
    if left.size == 0:
        raise ValueError("data must be nonempty")
    x = np.where(np.isinf(right), left + 1.0, 0.5 * (left + np.where(np.isinf(right), 0.0, right)))
    theta = float(x.max() + 1.0)
    return GibbsState(z=np.zeros(left.size, dtype=np.int64), thetas=np.array([theta]),
                      x=x, s=min(1.0, theta / 2.0))


def step_z(state: GibbsState, data, prior: PriorConfig, rng: np.random.Generator) -> GibbsState:
    """Reseat each observation in turn given its latent time.

    Existing table ``c`` has weight ``n_{-i,c} / theta_c * 1{x_i <= theta_c}``;
    a new table has weight ``alpha * s / (2 max(s, x_i)^2)`` and gets
    ``theta ~ Par(max(s, x_i), 2)``.
    """
    n = state.x.size
    u = rng.random(2 * n)
    z = state.z.astype(np.int64).copy()
    thetas = np.empty(n)
    thetas[:state.n_tables] = state.thetas
    counts = np.zeros(n, dtype=np.int64)
    counts[:state.n_tables] = state.table_sizes()
    m = _reseat(z, thetas, counts, state.n_tables, state.x, float(state.s), float(prior.alpha),
                u[:n], u[n:])
    return replace(state, z=z, thetas=thetas[:m].copy())


def step_theta(state: GibbsState, data, prior: PriorConfig, rng: np.random.Generator) -> GibbsState:
    """Table endpoints from ``Par(max(s, max member x), size + 1)``."""
    m = state.n_tables
    u = rng.random(m)
    lower = np.maximum(state.s, _table_max(state.z, state.x, m))
    thetas = sample_pareto(lower, state.table_sizes() + 1.0, u)
    return replace(state, thetas=thetas)


def step_s(state: GibbsState, prior: PriorConfig, rng: np.random.Generator) -> GibbsState:
    """Base scale from ``Gamma(base_shape + #tables, base_rate)`` truncated to ``(0, min theta]``."""
    upper = float(state.thetas.min()) if state.n_tables else math.inf
    s = sample_truncated_gamma(prior.base_shape + state.n_tables, prior.base_rate, upper, rng)
    return replace(state, s=s)


def step_x(state: GibbsState, data, rng: np.random.Generator) -> GibbsState:
    """Latent times uniform on ``(L_i, min(R_i, theta_{z_i})]``."""
    left, right = interval_bounds(data)
    u = rng.random(left.size)
    x, bad = _impute(state.z, state.thetas, left, right, u)
    if bad >= 0:
        raise InvariantError(
            f"empty imputation interval for observation {bad}: "
            f"({left[bad]}, min({right[bad]}, {state.thetas[state.z[bad]]})]")
    return replace(state, x=x)


def posterior_draw_F(state: GibbsState, prior: PriorConfig, grid) -> GridFunction:
    """Conditional posterior mean of ``F`` given the current seating and endpoints.

    ``alpha/(alpha+n) * prior_mean_cdf(t | s) + 1/(alpha+n) * sum_i Psi(t, theta_{z_i})``.
    """
    grid = np.asarray(grid, dtype=float)
    return GridFunction(grid, _draw_values(state, prior.alpha, grid))


def _draw_values(state: GibbsState, alpha: float, grid: np.ndarray) -> np.ndarray:
    n = state.x.size
    values = alpha * prior_mean_cdf(grid, state.s)
    if n:
        sizes = state.table_sizes()
        th = state.thetas[:, None]
        values = values + sizes @ (np.minimum(grid[None, :], th) / th)
    return values / (alpha + n)


@dataclass(frozen=True, eq=False)
class ChainSummary:
    """Posterior summaries on ``grid`` plus per-iteration scalar traces.

    ``trace`` holds the conditional posterior mean of ``F`` at
    ``trace_point`` for every iteration, burn-in included; ``draws`` are the
    thinned post-burn-in draws used for the quantile bands.
    """

    grid: np.ndarray
    mean_cdf: np.ndarray
    lower_band: np.ndarray
    upper_band: np.ndarray
    trace: np.ndarray
    trace_point: float
    table_counts: np.ndarray
    s_trace: np.ndarray
    draws: np.ndarray
    n_retained: int
    quantiles: tuple[float, float]

    def band_width(self) -> np.ndarray:
        return self.upper_band - self.lower_band


def quantile_bands(draws, quantiles=(0.025, 0.975)) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise quantiles (linear interpolation) over the rows of ``draws``."""
    draws = np.asarray(draws, dtype=float)
    if draws.ndim != 2 or draws.shape[0] == 0:
        raise ValueError("draws must be a nonempty 2-d array (draw x grid)")
    lo, hi = np.quantile(draws, quantiles, axis=0)
    return lo, hi


def run_chain(data, prior: PriorConfig | None = None,
              config: ChainConfig | None = None, callback=None) -> ChainSummary:
    """Run the sampler and summarise the post-burn-in draws.

    ``callback(iteration, state)``, if given, is called after every sweep.
    """
    prior = PriorConfig() if prior is None else prior
    config = ChainConfig() if config is None else config
    bounds = interval_bounds(data)
    left, right = bounds
    grid = config.grid
    rng = make_rng(config.seed, CHAIN, config.replicate)
    state = init_state(bounds, prior)
    state.check(left, right)

    point = np.array([config.record_trace_at])
    trace = np.empty(config.n_iter)
    s_trace = np.empty(config.n_iter)
    tables = np.empty(config.n_iter, dtype=np.int64)
    running = np.zeros(grid.size)
    kept = []

    for it in range(config.n_iter):
        try:
            state = step_z(state, bounds, prior, rng)
            state = step_theta(state, bounds, prior, rng)
            state = step_s(state, prior, rng)
            state = step_x(state, bounds, rng)
            state.check(left, right)
        except InvariantError as exc:
            raise InvariantError(f"infeasible state at iteration {it}: {exc}") from exc
        trace[it] = _draw_values(state, prior.alpha, point)[0]
        s_trace[it] = state.s
        tables[it] = state.n_tables
        if it >= config.burn_in:
            values = _draw_values(state, prior.alpha, grid)
            running += values
            if (it - config.burn_in) % config.thin == 0:
                kept.append(values)
        if callback is not None:
            callback(it, state)

    n_retained = config.n_iter - config.burn_in
    mean = running / n_retained
    draws = np.asarray(kept)
    lower, upper = quantile_bands(draws, config.quantiles)
    # degenerate grid points (all draws equal) can put the mean a rounding error outside
    lower = np.minimum(lower, mean)
    upper = np.maximum(upper, mean)
    return ChainSummary(grid=grid, mean_cdf=mean, lower_band=lower, upper_band=upper,
                        trace=trace, trace_point=float(config.record_trace_at),
                        table_counts=tables, s_trace=s_trace, draws=draws,
                        n_retained=n_retained, quantiles=tuple(config.quantiles))


def sample_prior(n: int, prior: PriorConfig, rng: np.random.Generator) -> GibbsState:
    """Forward draw of ``(s, z, thetas, x)`` from the prior (no censoring)."""
    s = rng.gamma(prior.base_shape) / prior.base_rate
    z = np.empty(n, dtype=np.int64)
    sizes = []
    for i in range(n):
        p = np.array(sizes + [prior.alpha], dtype=float)
        c = int(rng.choice(p.size, p=p / p.sum()))
        if c == len(sizes):
            sizes.append(1)
        else:
            sizes[c] += 1
        z[i] = c
    m = len(sizes)
    thetas = sample_pareto(s, 1.0, rng.random(m))
    x = thetas[z] * (1.0 - rng.random(n))
    return GibbsState(z=z, thetas=thetas, x=x, s=float(s))
