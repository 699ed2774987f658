"""Bayesian and likelihood estimation of a concave distribution function
from mixed-case interval-censored data."""

__version__ = "0.1.0"

from .core import (CensoredRecord, GridFunction, Interval, InvariantError, MixtureCDF,
                   Quadrature, StepCDF, cdf_eval, conditional_log_likelihood, distance_dn,
                   distance_dn_prime, h_divergence, interval_mass, l1_mu_distance, psi)
from .frequentist import EMConfig, concave_mle, npmle, turnbull_support
from .gibbs import ChainConfig, ChainSummary, GibbsState, PriorConfig, run_chain
from .simulate import SimConfig, generate

__all__ = [
    "CensoredRecord", "ChainConfig", "ChainSummary", "EMConfig", "GibbsState",
    "GridFunction", "Interval", "InvariantError", "MixtureCDF", "PriorConfig",
    "Quadrature", "SimConfig", "StepCDF", "cdf_eval", "concave_mle",
    "conditional_log_likelihood", "distance_dn", "distance_dn_prime", "generate",
    "h_divergence", "interval_mass", "l1_mu_distance", "npmle", "psi", "run_chain",
    "turnbull_support",
]
