"""Gibbs samplers for slab-regularized global-local shrinkage in binary regression."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    ChainDivergenceError,
    ComputationError,
    ConfigurationError,
    DomainError,
    RegShrinkError,
)
from .model import (
    Bridge,
    Dataset,
    GlobalScalePrior,
    Horseshoe,
    ModelState,
    PriorSpec,
    bridge_marginal_logdensity,
    regularized_conditional_variance,
    regularized_joint_logdensity,
    scale_conditional_logdensity,
)
from .polya_gamma import pg_mean, sample_pg1
from ._chain import ChainOutput, SamplerConfig
from .gibbs_logistic import gibbs_step_logistic, run_chain_logistic, sample_beta_conditional
from .gibbs_probit import gibbs_step_probit, probit_loglik, run_chain_probit, sample_beta_sun
from .simulation import SimConfig, generate_weak_signal_dataset

__all__ = [
    "__version__",
    "RegShrinkError", "DomainError", "ConfigurationError", "ComputationError",
    "ChainDivergenceError",
    "Dataset", "Bridge", "Horseshoe", "GlobalScalePrior", "PriorSpec", "ModelState",
    "regularized_conditional_variance", "scale_conditional_logdensity",
    "bridge_marginal_logdensity", "regularized_joint_logdensity",
    "pg_mean", "sample_pg1",
    "SamplerConfig", "ChainOutput",
    "sample_beta_conditional", "gibbs_step_logistic", "run_chain_logistic",
    "probit_loglik", "sample_beta_sun", "gibbs_step_probit", "run_chain_probit",
    "SimConfig", "generate_weak_signal_dataset",
]
