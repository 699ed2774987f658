"""Appendix approximation and the Kullback-Leibler functional."""

import math

import numpy as np
import pytest

from concavecdf.approximation import approximate_density, kl_functional
from concavecdf.core import MixtureCDF

f0 = lambda x: np.exp(-np.asarray(x, dtype=float))
F0 = lambda x: -np.expm1(-np.asarray(x, dtype=float))
CHECK = np.arange(1, 51) / 10.0


def test_weights_and_density():
    Fm = approximate_density(f0, F0, 50, 0.5, 0.25)
    assert Fm.weights.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.all(Fm.weights >= 0)
    dens = Fm.density(np.arange(1, 2501) / 50 - 0.01)
    assert np.all(np.diff(dens) <= 1e-15)


def test_sup_error_decreases():
    errs = [np.max(np.abs(approximate_density(f0, F0, m)(CHECK) - F0(CHECK))) for m in (20, 50, 100)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 0.05


def test_precondition_errors():
    with pytest.raises(ValueError):
        approximate_density(f0, F0, 50, a1=0.2, a2=0.5)
    with pytest.raises(ValueError, match="m too small|not found"):
        approximate_density(f0, F0, 1)


def test_kl_zero_at_truth_and_nonnegative():
    truth = MixtureCDF(np.array([1.0, 3.0]), np.array([0.4, 0.6]))
    pk = np.full(20, 1 / 20)
    est = kl_functional(truth, truth, pk, n_draws=300, rng=np.random.default_rng(0))
    assert est.value == 0.0 and est.tail_mass == 0.0
    other = MixtureCDF.uniform(12.0)
    est = kl_functional(truth, other, pk, n_draws=300, rng=np.random.default_rng(0))
    assert est.value >= 0.0


def test_kl_decreases_along_sequence():
    pk = np.full(20, 1 / 20)
    values = [kl_functional(F0, approximate_density(f0, F0, m), pk, n_draws=500,
                            rng=np.random.default_rng(1)).value for m in (20, 50, 100)]
    assert all(math.isfinite(v) for v in values)
    assert values[0] > values[1] > values[2] >= 0


def test_kl_reports_tail_mass():
    est = kl_functional(F0, F0, [0.5, 0.3], n_draws=10, rng=np.random.default_rng(0))
    assert est.tail_mass == pytest.approx(0.2)
