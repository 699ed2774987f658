"""Gibbs sampler steps and chain summaries."""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, stats

from concavecdf.core import InvariantError
from concavecdf.gibbs import (
    ChainConfig,
    GibbsState,
    PriorConfig,
    init_state,
    new_table_marginal,
    posterior_draw_F,
    prior_mean_cdf,
    run_chain,
    sample_truncated_gamma,
    step_s,
    step_theta,
    step_x,
    step_z,
)
from concavecdf.simulate import SimConfig, generate

PRIOR = PriorConfig()


def bounds(*pairs):
    left, right = zip(*pairs)
    return np.array(left, float), np.array(right, float)


# -- initialisation -----------------------------------------------------------

def test_init_examples():
    st = init_state(bounds((0.0, 2.0)))
    assert st.x[0] == 1.0 and st.thetas[0] == 2.0 and list(st.z) == [0]
    st = init_state(bounds((3.0, math.inf)))
    assert st.x[0] == 4.0


def test_init_feasible_on_random_datasets():
    rng = np.random.default_rng(0)
    for rep in range(1000):
        n = int(rng.integers(1, 8))
        records, _ = generate(SimConfig(n=n, k_max=5, seed=rep))
        data = [r.interval for r in records]
        left = np.array([iv.left for iv in data])
        right = np.array([iv.right for iv in data])
        init_state(data, PRIOR).check(left, right)


# -- latent times -------------------------------------------------------------

def test_step_x_truncated_uniform_ks():
    n = 100_000
    data = (np.full(n, 0.2), np.full(n, 0.8))
    st = GibbsState(z=np.zeros(n, np.int64), thetas=np.array([0.5]), x=np.full(n, 0.3), s=0.1)
    x = step_x(st, data, np.random.default_rng(1)).x
    assert x.min() > 0.2 and x.max() <= 0.5
    assert stats.kstest(x, stats.uniform(0.2, 0.3).cdf).pvalue > 1e-3
    st = replace(st, thetas=np.array([2.0]))
    x = step_x(st, data, np.random.default_rng(2)).x
    assert stats.kstest(x, stats.uniform(0.2, 0.6).cdf).pvalue > 1e-3


def test_step_x_empty_intersection_raises():
    st = GibbsState(z=np.zeros(1, np.int64), thetas=np.array([0.5]), x=np.array([0.4]), s=0.1)
    with pytest.raises(InvariantError):
        step_x(st, bounds((1.0, 2.0)), np.random.default_rng(0))


# -- seating ------------------------------------------------------------------

def test_new_table_marginal_quadrature():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x, s = rng.uniform(0.05, 5.0, 2)
        exact = integrate.quad(lambda th: s * th ** -3.0, max(s, x), np.inf,
                               epsabs=0, epsrel=1e-12)[0]
        assert new_table_marginal(x, s) == pytest.approx(exact, rel=1e-8)
    assert new_table_marginal(1.7, 1.7) == pytest.approx(1 / (2 * 1.7))


def test_single_observation_reseats_feasibly():
    data = bounds((0.5, 1.5))
    st = init_state(data)
    rng = np.random.default_rng(0)
    for _ in range(200):
        st = step_z(st, data, PRIOR, rng)
        assert st.n_tables == 1 and st.z[0] == 0
        st.check(*data)


def _together_probability(alpha, s=0.5, x=1.0, theta_other=3.0):
    # obs 0 leaves its singleton; it joins table theta_other or opens a new one
    new_w = alpha * new_table_marginal(x, s)
    p_join = (1 / theta_other) / (1 / theta_other + new_w)
    # after a new table theta ~ Par(max(s, x), 2), obs 1 leaves and may join it
    lower = max(s, x)
    after_new = integrate.quad(lambda th: (1 / th) / (1 / th + new_w) * 2 * lower ** 2 * th ** -3,
                               lower, np.inf)[0]
    return p_join * p_join + (1 - p_join) * after_new


@pytest.mark.parametrize("alpha", [1.0, 0.01])
def test_co_clustering_matches_enumeration(alpha):
    prior = PriorConfig(alpha=alpha)
    start = GibbsState(z=np.array([0, 1]), thetas=np.array([2.0, 3.0]),
                       x=np.array([1.0, 1.0]), s=0.5)
    rng = np.random.default_rng(9)
    trials = 20000
    together = sum(step_z(start, None, prior, rng).n_tables == 1 for _ in range(trials))
    p = _together_probability(alpha)
    assert abs(together / trials - p) < 4 * math.sqrt(p * (1 - p) / trials) + 1e-9


def test_co_clustering_tends_to_one():
    probs = [_together_probability(a) for a in (1.0, 0.1, 0.01, 1e-4)]
    assert np.all(np.diff(probs) > 0) and probs[-1] > 0.999


# -- table endpoints ----------------------------------------------------------

def test_step_theta_pareto_posterior():
    m = 100_000
    st = GibbsState(z=np.arange(m), thetas=np.full(m, 3.0), x=np.full(m, 2.0), s=1.0)
    thetas = step_theta(st, None, PRIOR, np.random.default_rng(6)).thetas
    assert thetas.min() >= 2.0
    # oracle: normalize theta^-3 on [2, inf) numerically
    norm = integrate.quad(lambda t: t ** -3.0, 2.0, np.inf)[0]
    cdf = lambda t: integrate.quad(lambda v: v ** -3.0, 2.0, t)[0] / norm
    for q in (3.0, 5.0, 10.0):
        assert np.mean(thetas <= q) == pytest.approx(cdf(q), abs=0.005)
    se = thetas.std(ddof=1) / math.sqrt(m)
    assert abs(thetas.mean() - 4.0) < 3 * se


# -- base scale ---------------------------------------------------------------

@pytest.mark.parametrize("upper", [10.0, 1.5, 0.05])
def test_truncated_gamma_vs_rejection(upper):
    rng = np.random.default_rng(7)
    shape = 2.0
    inv = np.array([sample_truncated_gamma(shape, 1.0, upper, rng) for _ in range(4000)])
    ref = []
    while len(ref) < 4000:
        g = rng.gamma(shape, size=4000)
        ref.extend(g[g <= upper])
    assert inv.max() <= upper
    assert stats.ks_2samp(inv, np.asarray(ref[:4000])).pvalue > 1e-3


def test_truncated_gamma_far_tail():
    # truncated mass underflows: draws stay in (0, upper] and near the top
    rng = np.random.default_rng(0)
    draws = [sample_truncated_gamma(400.0, 1.0, 1.0, rng) for _ in range(200)]
    assert max(draws) <= 1.0 and min(draws) > 0.95


def test_step_s_respects_bound_and_limit():
    st = GibbsState(z=np.array([0, 1]), thetas=np.array([0.7, 4.0]), x=np.array([0.5, 3.0]), s=0.3)
    rng = np.random.default_rng(3)
    draws = np.array([step_s(st, PRIOR, rng).s for _ in range(2000)])
    assert draws.max() <= 0.7
    wide = replace(st, thetas=np.array([1e6, 2e6]))
    draws = np.array([step_s(wide, PRIOR, rng).s for _ in range(4000)])
    # untruncated limit: Gamma(base_shape + 2 tables, 1)
    assert stats.kstest(draws, stats.gamma(4.0).cdf).pvalue > 1e-3


# -- posterior draws ----------------------------------------------------------

def test_prior_mean_cdf_quadrature():
    rng = np.random.default_rng(8)
    for _ in range(20):
        x, s = rng.uniform(0.05, 5.0, 2)
        f = lambda th: min(x, th) / th * s * th ** -2.0
        knot = max(s, x)
        exact = sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12)[0]
                    for a, b in [(s, knot), (knot, np.inf)])
        assert prior_mean_cdf(x, s) == pytest.approx(exact, rel=1e-8)
    assert prior_mean_cdf(1.3, 1.3) == pytest.approx(0.5)


def test_posterior_draw_empty_data_is_prior_mean():
    st = GibbsState(z=np.zeros(0, np.int64), thetas=np.zeros(0), x=np.zeros(0), s=0.8)
    grid = np.linspace(0.1, 5, 50)
    np.testing.assert_allclose(posterior_draw_F(st, PRIOR, grid).values, prior_mean_cdf(grid, 0.8))


def test_posterior_draw_is_cdf():
    st = GibbsState(z=np.array([0, 0, 1]), thetas=np.array([1.0, 2.5]),
                    x=np.array([0.5, 0.9, 2.0]), s=0.4)
    v = posterior_draw_F(st, PRIOR, np.linspace(0.01, 8, 400)).values
    assert np.all(np.diff(v) >= 0) and v.min() >= 0 and v.max() <= 1


# -- chains -------------------------------------------------------------------

def _sim(n, rep=0, seed=0):
    records, _ = generate(SimConfig(n=n, seed=seed), replicate=rep)
    return records


def test_chain_replay_and_invariants():
    data = _sim(60)
    cfg = ChainConfig(n_iter=600, burn_in=200, seed=4)
    a = run_chain(data, PRIOR, cfg)
    b = run_chain(data, PRIOR, cfg)
    for field in ("mean_cdf", "lower_band", "upper_band", "trace", "table_counts", "s_trace", "draws"):
        assert np.array_equal(getattr(a, field), getattr(b, field))
    assert np.all(a.lower_band <= a.mean_cdf) and np.all(a.mean_cdf <= a.upper_band)
    assert np.all(np.diff(a.mean_cdf) >= -1e-15)
    assert a.mean_cdf.min() >= 0 and a.upper_band.max() <= 1
    assert a.draws.shape == (40, a.grid.size)
    c = run_chain(data, PRIOR, replace(cfg, seed=5))
    assert not np.array_equal(a.trace, c.trace)


def test_chain_callback_sees_feasible_states():
    data = _sim(20)
    left = np.array([r.interval.left for r in data])
    right = np.array([r.interval.right for r in data])
    seen = []

    def callback(it, state):
        state.check(left, right)
        seen.append(it)

    run_chain(data, PRIOR, ChainConfig(n_iter=50, burn_in=10), callback)
    assert seen == list(range(50))


@pytest.mark.slow
def test_band_width_shrinks_with_n():
    widths = []
    for n in (50, 200, 800):
        per = [run_chain(_sim(n, rep), PRIOR,
                         ChainConfig(n_iter=1500, burn_in=500, seed=rep, replicate=rep)).band_width().mean()
               for rep in range(5)]
        widths.append(np.mean(per))
    assert widths[0] > widths[1] > widths[2]
