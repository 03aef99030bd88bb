"""Polya-Gamma Gibbs sampler for slab-regularized sparse logistic regression.

One sweep updates, in order: tau | beta (collapsed over lambda for the
bridge), lambda | beta, tau, omega | beta, and beta | omega, tau, lambda.
"""
from __future__ import annotations

from typing import Optional

import numpy as np
from scipy import linalg

from ._chain import (
    ChainOutput,
    Counters,
    SamplerConfig,
    prior_precision,
    run_chains,
    update_scales,
)
from .errors import ComputationError, DomainError
from .model import Dataset, ModelState, PriorSpec
from .polya_gamma import sample_pg1

__all__ = [
    "SamplerConfig", "ChainOutput", "beta_conditional_moments", "sample_beta_conditional",
    "gibbs_step_logistic", "run_chain_logistic",
]


def _precision(omega, d, X):
    return (X.T * omega) @ X + np.diag(d)


def _factor(Phi):
    """Cholesky factor of the Jacobi-scaled precision."""
    s = np.sqrt(np.diag(Phi))
    try:
        c = linalg.cho_factor(Phi / np.outer(s, s), lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise ComputationError("precision matrix factorization failed",
                               diagnostics={"diag_min": float(np.min(np.diag(Phi)))}) from exc
    return c, s


def _solve(c, s, b):
    sc = s if np.ndim(b) == 1 else s[:, None]
    return linalg.cho_solve(c, b / sc, check_finite=False) / sc


def beta_conditional_moments(omega, tau, lam, zeta, data: Dataset, *, intercept_slab=10.0):
    """Mean and covariance of beta | omega, tau, lambda.

    Phi = X' Omega X + diag(zeta^-2 + tau^-2 lambda^-2) with the intercept
    diagonal replaced by intercept_slab^-2; mean Phi^-1 X'(y - 1/2).
    """
    d = prior_precision(tau, lam, zeta, data, intercept_slab)
    Phi = _precision(np.asarray(omega, dtype=float), d, data.X)
    c, s = _factor(Phi)
    mean = _solve(c, s, data.X.T @ (data.y - 0.5))
    cov = _solve(c, s, np.eye(data.p))
    return mean, 0.5 * (cov + cov.T)


def _draw_beta(omega, d, data: Dataset, rng, coord_rngs=None):
    """Draw from N(Phi^-1 X'(y - 1/2), Phi^-1) by perturbation.

    beta = Phi^-1 (X'(y - 1/2) + X' Omega^1/2 z1 + D^1/2 z2) with standard
    normal z1 (n) and z2 (p) has exactly the target law and only needs a
    Cholesky solve with Phi.
    """
    X = data.X
    Phi = _precision(omega, d, X)
    c, s = _factor(Phi)
    z1 = rng.standard_normal(data.n)
    if coord_rngs is None:
        z2 = rng.standard_normal(data.p)
    else:
        z2 = np.array([g.standard_normal() for g in coord_rngs])
    rhs = X.T @ (data.y - 0.5 + np.sqrt(omega) * z1) + np.sqrt(d) * z2
    return _solve(c, s, rhs)


def sample_beta_conditional(omega, tau, lam, zeta, data: Dataset, rng, *,
                            intercept_slab=10.0):
    """Draw beta | omega, tau, lambda, y under the slab-regularized prior."""
    omega = np.asarray(omega, dtype=float)
    lam = np.asarray(lam, dtype=float)
    if omega.shape != (data.n,) or lam.shape != (data.p,):
        raise DomainError("omega or lambda has the wrong length")
    if not (tau > 0 and zeta > 0) or np.any(lam <= 0) or np.any(omega <= 0):
        raise DomainError("scales must be positive")
    d = prior_precision(tau, lam, zeta, data, intercept_slab)
    return _draw_beta(omega, d, data, rng)


def gibbs_step_logistic(state: ModelState, data: Dataset, prior: PriorSpec, rng, *,
                        fix_tau: Optional[float] = None, fix_lambda=None,
                        local_method: str = "auto", coord_rngs=None,
                        counters: Optional[Counters] = None) -> ModelState:
    """One full sweep; returns a new state."""
    counters = counters if counters is not None else Counters()
    tau, lam = update_scales(state, data, prior, rng, fix_tau=fix_tau, fix_lambda=fix_lambda,
                             local_method=local_method, coord_rngs=coord_rngs,
                             counters=counters)
    eta = data.X @ state.beta
    omega, used = sample_pg1(eta, rng, return_proposals=True)
    omega = np.maximum(np.atleast_1d(omega), np.finfo(float).tiny)
    counters.add("pg_proposals", used)
    d = prior_precision(tau, lam, prior.slab_width, data, prior.intercept_slab)
    beta = _draw_beta(omega, d, data, rng, coord_rngs)
    return ModelState(beta=beta, lam=lam, tau=tau, omega=omega)


def run_chain_logistic(data: Dataset, prior: PriorSpec, config: SamplerConfig) -> ChainOutput:
    """Run the logistic sampler; see ``SamplerConfig`` for burn-in and thinning."""
    return run_chains(gibbs_step_logistic, data, prior, config, with_omega=True)
