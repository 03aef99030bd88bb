"""Bridge local-scale conditional.

Under the bridge prior, psi = lambda^-2 / 2 given (beta, tau) is a positive
stable variable of index alpha / 2 exponentially tilted by (beta / tau)^2.
Draws come from the tilted-stable samplers; alpha = 1 (Laplace) reduces to
an inverse-Gaussian draw.  A stepping-out slice sampler on log lambda is
kept as a fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..model import Bridge, log_local_prior
from ..stable import sample_tilted_stable
from .slice import slice_sample

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class TiltedStableParams:
    """Index alpha of the bridge, tilt (beta / tau)^2 and stable scale.

    ``scale`` is the scale of the index-alpha/2 stable law in the
    characteristic-function parameterization, matching the Laplace transform
    exp(-s^(alpha/2)) used for psi.
    """

    alpha: float
    tilt: float

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError("tilted stable index requires 0 < alpha < 1")
        if not (self.tilt >= 0.0):
            raise DomainError("tilt must be non-negative")

    @property
    def scale(self) -> float:
        return math.cos(self.alpha * math.pi / 4.0) ** (2.0 / self.alpha)


def _psi_to_lambda(psi):
    psi = np.minimum(np.asarray(psi, dtype=float), np.finfo(float).max / 4)
    lam = 1.0 / np.sqrt(2.0 * psi)
    return np.maximum(lam, _TINY)


def sample_bridge_local(beta_over_tau, alpha, rng, *, method="auto",
                        return_counts=False):
    """Draw lambda from pi(lambda | beta, tau), alpha in (0, 1).

    Parameters
    ----------
    beta_over_tau : float or array_like
    alpha : float
        Bridge exponent; alpha = 1 is handled by ``sample_laplace_local``.
    method : {"auto", "double_rejection", "naive"}
        Tilted stable algorithm, see ``regshrink.stable.sample_tilted_stable``.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"bridge local sampler needs alpha in (0, 1), got {alpha}")
    x = np.asarray(beta_over_tau, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("beta / tau must be finite")
    # tilts beyond 1e300 would overflow; the conditional is then a point mass anyway
    tilt = np.minimum(np.abs(x), 1e150).ravel() ** 2
    psi, rounds = sample_tilted_stable(alpha / 2.0, tilt, rng, method=method)
    lam = _psi_to_lambda(psi).reshape(x.shape)
    value = float(lam) if x.ndim == 0 else lam
    return (value, rounds) if return_counts else value


def sample_laplace_local(beta_over_tau, rng):
    """alpha = 1: psi given x is inverse Gaussian(1 / (2|x|), 1/2)."""
    x = np.abs(np.asarray(beta_over_tau, dtype=float))
    flat = x.ravel()
    psi = np.empty(flat.size)
    zero = flat == 0.0
    if np.any(~zero):
        psi[~zero] = rng.wald(0.5 / flat[~zero], 0.5)
    if np.any(zero):
        # untilted: Levy law with Laplace transform exp(-sqrt(s))
        psi[zero] = 0.5 / rng.standard_normal(int(zero.sum())) ** 2
    lam = _psi_to_lambda(psi).reshape(x.shape)
    return float(lam) if x.ndim == 0 else lam


def bridge_local_logdensity(lam, beta_over_tau, alpha):
    """Unnormalized log pi(lambda | beta, tau) on the lambda scale."""
    lam = float(lam)
    if lam <= 0:
        return -math.inf
    x = float(beta_over_tau)
    return (-math.log(lam) - 0.5 * (x / lam) ** 2
            + float(log_local_prior(lam, Bridge(alpha))))


def sample_bridge_local_slice(beta_over_tau, alpha, current, rng, *, width=1.0,
                              max_steps=50):
    """Fallback: one stepping-out slice update of each lambda_j on log lambda."""
    x = np.atleast_1d(np.asarray(beta_over_tau, dtype=float))
    cur = np.atleast_1d(np.asarray(current, dtype=float))
    out = np.empty(x.size)
    steps = 0
    for j in range(x.size):
        def logf(s, xj=x[j]):
            return bridge_local_logdensity(math.exp(s), xj, alpha) + s

        s_new, used = slice_sample(logf, math.log(cur[j]), rng, width=width,
                                   max_steps=max_steps)
        out[j] = math.exp(s_new)
        steps += used
    return out, steps
