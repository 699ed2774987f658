"""Maximum likelihood baselines for interval-censored data.

Both estimators maximize the same conditional likelihood
``sum_i log(F(R_i) - F(L_i))``: the NPMLE over all distribution functions
(support reduced to the innermost Turnbull intervals) and the concave MLE
over mixtures of uniforms on a fixed candidate grid of upper endpoints.

Both reduce to a mixing-weight problem: maximize ``sum_i c_i log (A w)_i``
over the probability simplex, for a nonnegative kernel matrix ``A``.  Two
solvers share that form:

``"cnm"`` (default)
    Constrained Newton: each step solves a nonnegative least-squares fit of
    the quadratic approximation on the current support plus the local maxima
    of the directional derivative, followed by a backtracking line search.
``"em"``
    Self-consistency (EM) iterations ``w_j <- w_j * (1/n) sum_i c_i a_ij / f_i``.

Both never decrease the log-likelihood.  ``"cnm"`` stops once the relative
log-likelihood change is below ``tol`` *and* the largest directional
derivative is within ``certificate_tol`` of one, which certifies the
optimum; ``"em"`` uses the log-likelihood rule alone and converges slowly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .core import MixtureCDF, StepCDF, interval_bounds


@dataclass(frozen=True)
class EMConfig:
    """Solver settings.

    ``tol`` bounds the relative log-likelihood change between iterations;
    ``certificate_tol`` bounds ``max directional derivative - 1`` (``"cnm"``
    only).
    """

    tol: float = 1e-8
    max_iter: int = 50000
    method: str = "cnm"
    certificate_tol: float = 1e-9
    fill_points: int = 50
    extension_factors: tuple[float, ...] = (1.5, 2.0, 4.0, 8.0)
    prune_below: float = 1e-10

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.method not in ("cnm", "em"):
            raise ValueError(f"unknown method {self.method!r}; use 'cnm' or 'em'")
        if not self.certificate_tol > 0:
            raise ValueError("certificate_tol must be positive")
        if self.fill_points < 0:
            raise ValueError("fill_points must be >= 0")


@dataclass(frozen=True, eq=False)
class TurnbullIntervals:
    """Innermost intervals ``(left[l], right[l]]``, disjoint and sorted."""

    left: np.ndarray
    right: np.ndarray

    def __len__(self):
        return self.left.size

    def contained_in(self, left, right) -> np.ndarray:
        """Boolean matrix: innermost interval ``l`` lies inside observation ``i``."""
        left = np.asarray(left, dtype=float)[:, None]
        right = np.asarray(right, dtype=float)[:, None]
        return (self.left[None, :] >= left) & (self.right[None, :] <= right)


def turnbull_support(data) -> TurnbullIntervals:
    """Maximal intersections of the observed censoring intervals.

    Sweep the sorted endpoints; an innermost interval is a left endpoint
    followed immediately by a right endpoint.  At equal values right
    endpoints sort first, since ``(a, v]`` and ``(v, b]`` are disjoint.
    """
    left, right = interval_bounds(data)
    if left.size == 0:
        raise ValueError("data must be nonempty")
    values = np.concatenate([left, right])
    is_right = np.concatenate([np.zeros(left.size, bool), np.ones(right.size, bool)])
    order = np.lexsort((~is_right, values))
    values, is_right = values[order], is_right[order]
    start = ~is_right[:-1] & is_right[1:]
    p, q = values[:-1][start], values[1:][start]
    keep = np.ones(p.size, bool)
    keep[1:] = (p[1:] != p[:-1]) | (q[1:] != q[:-1])
    return TurnbullIntervals(p[keep], q[keep])


def directional_derivative(a: np.ndarray, weights: np.ndarray, counts=None) -> np.ndarray:
    """``(1/n) sum_i c_i a_ij / f_i`` for every column; all ``<= 1`` at the optimum."""
    counts = np.ones(a.shape[0]) if counts is None else np.asarray(counts, dtype=float)
    f = a @ weights
    return (counts / f) @ a / counts.sum()


def _loglik(a, w, counts) -> float:
    f = a @ w
    if np.any(f <= 0):
        return -np.inf
    return float(counts @ np.log(f))


def _local_maxima(d: np.ndarray) -> np.ndarray:
    padded = np.concatenate([[-np.inf], d, [-np.inf]])
    return np.flatnonzero((d >= padded[:-2]) & (d >= padded[2:]))


@dataclass(frozen=True, eq=False)
class WeightFit:
    weights: np.ndarray
    log_likelihood: float
    history: np.ndarray
    n_iter: int
    converged: bool
    certificate: float


def fit_mixing_weights(a: np.ndarray, counts=None, em: EMConfig | None = None,
                       w0: np.ndarray | None = None) -> WeightFit:
    """Maximize ``sum_i c_i log (a @ w)_i`` over probability vectors ``w``.

    Columns of ``a`` are assumed ordered along their natural support (so
    local maxima of the directional derivative are meaningful).
    """
    em = EMConfig() if em is None else em
    a = np.asarray(a, dtype=float)
    counts = np.ones(a.shape[0]) if counts is None else np.asarray(counts, dtype=float)
    n = counts.sum()
    w = np.full(a.shape[1], 1.0 / a.shape[1]) if w0 is None else np.asarray(w0, float).copy()
    ll = _loglik(a, w, counts)
    history = [ll]
    step = _em_step if em.method == "em" else _cnm_step
    converged = False
    it = 0
    while it < em.max_iter:
        it += 1
        w, new = step(a, w, counts, n, ll)
        history.append(new)
        small = abs(new - ll) <= em.tol * abs(new)
        ll = new
        if small and (em.method == "em"
                      or directional_derivative(a, w, counts).max() <= 1.0 + em.certificate_tol):
            converged = True
            break
    cert = float(directional_derivative(a, w, counts).max())
    return WeightFit(w, ll, np.asarray(history), it, converged, cert)


def _em_step(a, w, counts, n, ll):
    f = a @ w
    w = w * ((counts / f) @ a) / n
    w /= w.sum()
    return w, _loglik(a, w, counts)


def _cnm_step(a, w, counts, n, ll):
    f = a @ w
    d = (counts / f) @ a / n
    support = np.union1d(np.flatnonzero(w > 0), _local_maxima(d)[d[_local_maxima(d)] > 1.0])
    scale = np.sqrt(counts)
    design = a[:, support] / f[:, None] * scale[:, None]
    target = 2.0 * scale
    # the sum-to-one constraint enters as a heavily weighted extra row
    design = np.vstack([design, 1e3 * np.sqrt(n) * np.ones(support.size)])
    target = np.append(target, 1e3 * np.sqrt(n))
    coef, _ = optimize.nnls(design, target, maxiter=50 * support.size + 100)
    if coef.sum() <= 0:
        return w, ll
    proposal = np.zeros_like(w)
    proposal[support] = coef / coef.sum()
    direction = proposal - w
    slope = float(d @ direction) * n
    lam = 1.0
    while lam > 1e-12:
        trial = w + lam * direction
        trial = np.where(trial < 1e-300, 0.0, trial)
        trial /= trial.sum()
        new = _loglik(a, trial, counts)
        if new >= ll + lam * slope / 3.0 and new >= ll:
            return trial, new
        lam *= 0.5
    return w, ll


@dataclass(frozen=True, eq=False)
class NPMLEResult:
    cdf: StepCDF
    intervals: TurnbullIntervals
    masses: np.ndarray
    log_likelihood: float
    history: np.ndarray
    n_iter: int
    converged: bool
    certificate: float


def _group(left, right):
    pairs, counts = np.unique(np.column_stack([left, right]), axis=0, return_counts=True)
    return pairs[:, 0], pairs[:, 1], counts.astype(float)


def npmle(data, em: EMConfig | None = None) -> NPMLEResult:
    """Unconstrained NPMLE: masses on the innermost (Turnbull) intervals.

    Mass on an innermost interval is placed at its right endpoint in the
    returned step function; within the interval the NPMLE is not identified.
    Mass on an interval reaching ``inf`` stays at ``+inf``.
    """
    left, right = interval_bounds(data)
    support = turnbull_support((left, right))
    gl, gr, counts = _group(left, right)
    fit = fit_mixing_weights(support.contained_in(gl, gr).astype(float), counts, em)
    return NPMLEResult(cdf=_step_from_masses(support, fit.weights), intervals=support,
                       masses=fit.weights, log_likelihood=fit.log_likelihood,
                       history=fit.history, n_iter=fit.n_iter, converged=fit.converged,
                       certificate=fit.certificate)


def _step_from_masses(support: TurnbullIntervals, p: np.ndarray) -> StepCDF:
    keep = (p > 0) & np.isfinite(support.right)
    return StepCDF(support.right[keep], p[keep])


def candidate_thetas(data, em: EMConfig | None = None) -> np.ndarray:
    """Support grid for the concave MLE.

    Every finite positive endpoint, the largest one scaled by
    ``extension_factors`` (room for right-censored observations), and
    ``fill_points`` log-spaced points spanning the range.
    """
    em = EMConfig() if em is None else em
    left, right = interval_bounds(data)
    ends = np.concatenate([left[left > 0], right[np.isfinite(right)]])
    if ends.size == 0:
        raise ValueError("no finite positive endpoint to anchor the grid")
    top = ends.max()
    parts = [ends, top * np.asarray(em.extension_factors, dtype=float)]
    if em.fill_points:
        parts.append(np.geomspace(ends.min(), top * max(em.extension_factors, default=1.0),
                                  em.fill_points))
    return np.unique(np.concatenate(parts))


def uniform_kernel(left, right, thetas) -> np.ndarray:
    """``a[i, j] = Psi(R_i, theta_j) - Psi(L_i, theta_j)`` with ``Psi(inf, .) = 1``."""
    left = np.asarray(left, dtype=float)[:, None]
    right = np.asarray(right, dtype=float)[:, None]
    th = np.asarray(thetas, dtype=float)[None, :]
    upper = np.where(np.isinf(right), 1.0, np.minimum(right, th) / th)
    return upper - np.minimum(left, th) / th


@dataclass(frozen=True, eq=False)
class ConcaveMLEResult:
    cdf: MixtureCDF
    thetas: np.ndarray
    weights: np.ndarray
    log_likelihood: float
    history: np.ndarray
    n_iter: int
    converged: bool
    certificate: float


def concave_mle(data, em: EMConfig | None = None,
                thetas: np.ndarray | None = None) -> ConcaveMLEResult:
    """Concave MLE as the maximum-likelihood mixing distribution on a grid of endpoints.

    Weights below ``em.prune_below`` are dropped from the returned CDF and
    the rest renormalized; ``weights`` keeps the unpruned solution.
    ``certificate`` is the largest directional derivative over the grid.
    """
    em = EMConfig() if em is None else em
    left, right = interval_bounds(data)
    thetas = candidate_thetas((left, right), em) if thetas is None else np.sort(np.asarray(thetas, float))
    gl, gr, counts = _group(left, right)
    fit = fit_mixing_weights(uniform_kernel(gl, gr, thetas), counts, em)
    w = fit.weights
    keep = w >= em.prune_below
    cdf = MixtureCDF(thetas[keep], w[keep] / w[keep].sum())
    return ConcaveMLEResult(cdf=cdf, thetas=thetas, weights=w,
                            log_likelihood=fit.log_likelihood, history=fit.history,
                            n_iter=fit.n_iter, converged=fit.converged,
                            certificate=fit.certificate)
