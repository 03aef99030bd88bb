"""Conjugate Gibbs sampler for slab-regularized sparse probit regression.

Given (tau, lambda) the posterior of beta is unified skew-normal.  With
prior covariance Omega = D^-1 and signed design S (rows (2y_i - 1) x_i), a
draw is

    beta = V0 + Omega S' G^-1 V1,   G = S Omega S' + I,

where V0 ~ N(0, Omega - Omega S' G^-1 S Omega) and V1 ~ N(0, G) truncated to
the positive orthant.  V1 is drawn by rejection from the untruncated normal,
which is practical for small n only.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg, special

from ._chain import ChainOutput, Counters, SamplerConfig, prior_precision, run_chains, update_scales
from .errors import ComputationError, DomainError
from .model import Dataset, ModelState, PriorSpec

__all__ = [
    "SunConditional", "probit_loglik", "sample_beta_sun", "gibbs_step_probit",
    "run_chain_probit",
]

DEFAULT_BUDGET = 2_000_000


def probit_loglik(beta, data: Dataset) -> float:
    """Sum of log Phi((2 y_i - 1) x_i' beta)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (data.p,):
        raise DomainError(f"beta has shape {beta.shape}, expected ({data.p},)")
    s = 2.0 * data.y - 1.0
    return float(np.sum(special.log_ndtr(s * (data.X @ beta))))


@dataclass(frozen=True)
class SunConditional:
    """Factors for the additive representation of beta | tau, lambda, y.

    Attributes
    ----------
    prior_precision : diagonal of D
    signed_design : S, shape (n, p)
    gain : Omega S' G^-1, shape (p, n)
    chol_g : lower Cholesky factor of G
    chol_v0 : lower factor of the Gaussian part's covariance
    """

    prior_precision: np.ndarray
    signed_design: np.ndarray
    gain: np.ndarray
    chol_g: np.ndarray
    chol_v0: np.ndarray

    @classmethod
    def build(cls, d, data: Optional[Dataset]):
        d = np.asarray(d, dtype=float)
        if not np.all(d > 0):
            raise DomainError("prior precision must be positive definite")
        omega = 1.0 / d
        p = d.size
        if data is None or data.n == 0:
            return cls(d, np.zeros((0, p)), np.zeros((p, 0)), np.zeros((0, 0)),
                       np.diag(np.sqrt(omega)))
        S = (2.0 * data.y - 1.0)[:, None] * data.X
        SO = S * omega
        G = SO @ S.T + np.eye(data.n)
        Lg = linalg.cholesky(G, lower=True)
        gain = linalg.cho_solve((Lg, True), SO).T
        cov0 = np.diag(omega) - gain @ SO
        cov0 = 0.5 * (cov0 + cov0.T)
        # cov0 is positive definite but may be badly scaled; factor after
        # Jacobi scaling and fall back to an eigen-decomposition if needed
        s = np.sqrt(np.maximum(np.diag(cov0), np.finfo(float).tiny))
        try:
            L0 = linalg.cholesky(cov0 / np.outer(s, s), lower=True) * s[:, None]
        except linalg.LinAlgError:
            w, V = linalg.eigh(cov0)
            L0 = V * np.sqrt(np.maximum(w, 0.0))
        return cls(d, S, gain, Lg, L0)

    def sample(self, rng, *, budget=DEFAULT_BUDGET):
        """Draw beta; returns (beta, proposals used for the truncated part)."""
        p = self.prior_precision.size
        n = self.signed_design.shape[0]
        v0 = self.chol_v0 @ rng.standard_normal(p)
        if n == 0:
            return v0, 0
        used = 0
        batch = 64
        while used < budget:
            z = rng.standard_normal((batch, n)) @ self.chol_g.T
            ok = np.flatnonzero(np.all(z > 0, axis=1))
            used += batch
            if ok.size:
                used -= batch - (ok[0] + 1)
                return v0 + self.gain @ z[ok[0]], used
            batch = min(batch * 2, 65536)
        raise ComputationError(
            "truncated-normal rejection budget exhausted; reduce n or use a tilting method",
            diagnostics={"n": n, "proposals": used})


def sample_beta_sun(tau, lam, zeta, data: Optional[Dataset], rng, *, intercept_slab=10.0,
                    budget=DEFAULT_BUDGET, return_proposals=False):
    """Exact draw of beta | tau, lambda, y under the probit likelihood.

    ``data`` may be None for a prior-only draw, in which case ``lam`` fixes p
    and there is no intercept.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if not (tau > 0 and zeta > 0) or np.any(lam <= 0):
        raise DomainError("scales must be positive")
    if data is not None and lam.shape != (data.p,):
        raise DomainError("lambda has the wrong length")
    shape_only = data if data is not None else _NoData(lam.size)
    d = prior_precision(tau, lam, zeta, shape_only, intercept_slab)
    cond = SunConditional.build(d, data)
    beta, used = cond.sample(rng, budget=budget)
    return (beta, used) if return_proposals else beta


class _NoData:
    has_intercept = False

    def __init__(self, p):
        self.p = p


def gibbs_step_probit(state: ModelState, data: Dataset, prior: PriorSpec, rng, *,
                      fix_tau: Optional[float] = None, fix_lambda=None,
                      local_method: str = "auto", coord_rngs=None,
                      counters: Optional[Counters] = None) -> ModelState:
    """One sweep: tau, lambda (shared with the logistic chain), then beta."""
    counters = counters if counters is not None else Counters()
    tau, lam = update_scales(state, data, prior, rng, fix_tau=fix_tau, fix_lambda=fix_lambda,
                             local_method=local_method, coord_rngs=coord_rngs,
                             counters=counters)
    d = prior_precision(tau, lam, prior.slab_width, data, prior.intercept_slab)
    if data.has_intercept and d[0] == 0.0:
        raise DomainError("the probit sampler needs a finite intercept slab")
    beta, used = SunConditional.build(d, data).sample(rng)
    counters.add("sun_proposals", used)
    return ModelState(beta=beta, lam=lam, tau=tau)


def run_chain_probit(data: Dataset, prior: PriorSpec, config: SamplerConfig) -> ChainOutput:
    """Run the probit sampler; arguments as for the logistic runner."""
    return run_chains(gibbs_step_probit, data, prior, config, with_omega=False)
