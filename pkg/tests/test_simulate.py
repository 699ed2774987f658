"""Data generation."""

import math

import numpy as np
import pytest
from scipy import stats

from concavecdf.core import CensoredRecord
from concavecdf.simulate import SimConfig, draw_inspections, event_cdf, generate, locate


def test_current_status_binomial():
    cfg = SimConfig(n=10000, k_fixed=1, inspection_law="fixed", inspection_params=(1.0,), seed=3)
    records, _ = generate(cfg)
    hits = sum(r.delta_index == 1 for r in records)
    p = 1 - math.exp(-1)
    se = math.sqrt(p * (1 - p) / cfg.n)
    assert abs(hits / cfg.n - p) < 3 * se


def test_delta_matches_events():
    records, events = generate(SimConfig(n=300, seed=1))
    for rec, x in zip(records, events):
        iv = rec.interval
        assert iv.left < x <= iv.right
        if x > rec.times[-1]:
            assert rec.delta_index == rec.k + 1 and math.isinf(iv.right)


def test_locate_boundaries():
    t = np.array([1.0, 2.0])
    assert locate(t, 0.5) == 1
    assert locate(t, 1.0) == 1
    assert locate(t, 1.5) == 2
    assert locate(t, 2.5) == 3


def test_same_seed_same_data():
    a = generate(SimConfig(n=50, seed=11), replicate=2)
    b = generate(SimConfig(n=50, seed=11), replicate=2)
    c = generate(SimConfig(n=50, seed=11), replicate=3)
    assert a == b
    assert a != c


def test_inspections_sorted_and_bounded():
    rng = np.random.default_rng(0)
    for law, params in [("gamma", (2.0, 1.0)), ("uniform", (0.0, 3.0))]:
        cfg = SimConfig(inspection_law=law, inspection_params=params)
        for k in (1, 5, 20):
            t = draw_inspections(cfg, k, rng)
            assert t.size == k and t[0] > 0 and np.all(np.diff(t) > 0)


def test_delta_distribution_chi_square():
    times = (0.5, 1.0, 2.0)
    cfg = SimConfig(n=4000, k_fixed=3, inspection_law="fixed", inspection_params=times,
                    event_law="halfnormal", seed=5)
    records, _ = generate(cfg)
    observed = np.bincount([r.delta_index for r in records], minlength=5)[1:]
    F = event_cdf("halfnormal")
    cuts = np.array([0.0, *times, np.inf])
    probs = np.diff(np.where(np.isinf(cuts), 1.0, F(np.where(np.isinf(cuts), 0.0, cuts))))
    _, pval = stats.chisquare(observed, probs * cfg.n)
    assert pval > 1e-3


def test_config_validation():
    with pytest.raises(ValueError):
        SimConfig(n=0)
    with pytest.raises(ValueError):
        SimConfig(event_law="weibull")
    with pytest.raises(ValueError):
        SimConfig(inspection_law="fixed", inspection_params=(1.0, 2.0), k_fixed=1)
    assert isinstance(generate(SimConfig(n=1))[0][0], CensoredRecord)
