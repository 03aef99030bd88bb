"""Global-scale (tau) updates.

Bridge: tau is drawn from its collapsed conditional given beta alone.  With
phi = tau^-alpha the bridge marginal gives a conjugate update
phi | beta ~ Gamma(s + p / alpha, r + sum_j |beta_j|^alpha), truncated so that
E[|beta_j| | tau] stays inside [mean_abs_lo, mean_abs_hi].

Other families: tau | beta, lambda with density proportional to
pi_glo(tau) prod_j tau^-1 exp(-beta_j^2 / 2 tau^2 lambda_j^2) on
[tau_min, tau_max].  Under a gamma prior on 1/tau with zero rate this is a
truncated gamma in tau^-2 and is drawn exactly; otherwise a slice sampler on
log tau is used.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from ..errors import ComputationError, ConfigurationError, DomainError
from ..model import Bridge, GlobalScalePrior, PriorSpec, bridge_mean_abs_factor, tau_support
from .slice import slice_sample

_MIN_MASS = 1e-12


def _power_law_draw(k, lo, hi, u):
    """Inverse CDF for density proportional to x^(k-1) on [lo, hi]."""
    if k == 0.0:
        return math.exp(math.log(lo) + u * (math.log(hi) - math.log(lo)))
    if k > 0:
        # x^k uniform between lo^k and hi^k, in log space
        a = k * math.log(lo) if lo > 0 else -math.inf
        b = k * math.log(hi)
        # log(lo^k + u (hi^k - lo^k))
        if math.isinf(a):
            val = b + math.log(u) if u > 0 else -math.inf
        else:
            val = b + math.log(u + (1 - u) * math.exp(a - b))
        return math.exp(val / k)
    # k < 0: x^k decreasing; needs lo > 0
    a = k * math.log(lo)
    b = k * math.log(hi) if math.isfinite(hi) else -math.inf
    if math.isinf(b):
        val = a + math.log1p(-u) if u < 1 else -math.inf
    else:
        val = a + math.log((1 - u) + u * math.exp(b - a))
    return math.exp(val / k)


def sample_truncated_gamma(shape, rate, lo, hi, rng):
    """Gamma(shape, rate) restricted to [lo, hi] (0 <= lo < hi <= inf).

    Inverse CDF on the regularized incomplete gamma function; when the
    interval holds less than 1e-12 of the mass a rejection sampler is used.

    Returns
    -------
    x : float
    retries : int
        Rejection retries (0 on the inverse-CDF path).
    """
    k = float(shape)
    r = float(rate)
    lo = float(lo)
    hi = float(hi)
    if not (0.0 <= lo < hi):
        raise ConfigurationError(f"empty truncation interval [{lo}, {hi}]")
    if r < 0:
        raise DomainError("rate must be non-negative")
    if r == 0.0:
        if not math.isfinite(hi) or (k <= 0 and lo == 0.0):
            raise ConfigurationError("improper truncated gamma: zero rate needs a bounded interval")
        return _power_law_draw(k, lo, hi, rng.random()), 0
    if k <= 0:
        if lo == 0.0:
            raise ConfigurationError("improper truncated gamma: shape <= 0 needs lo > 0")
        return _truncated_gamma_rejection(k, r, lo, hi, rng)
    ylo, yhi = r * lo, r * hi
    p_lo = special.gammainc(k, ylo)
    if p_lo > 0.5:
        q_lo = special.gammaincc(k, ylo)
        q_hi = special.gammaincc(k, yhi) if math.isfinite(yhi) else 0.0
        mass = q_lo - q_hi
        if mass >= _MIN_MASS:
            u = q_hi + rng.random() * mass
            y = special.gammainccinv(k, u)
            return float(np.clip(y / r, lo, hi)), 0
    else:
        p_hi = special.gammainc(k, yhi) if math.isfinite(yhi) else 1.0
        mass = p_hi - p_lo
        if mass >= _MIN_MASS:
            u = p_lo + rng.random() * mass
            y = special.gammaincinv(k, u)
            return float(np.clip(y / r, lo, hi)), 0
    return _truncated_gamma_rejection(k, r, lo, hi, rng)


def _truncated_gamma_rejection(k, r, lo, hi, rng, max_tries=1_000_000):
    ylo, yhi = r * lo, r * hi
    mode = max(k - 1.0, 0.0)
    tries = 0
    if ylo >= mode and k > 0:
        # right tail: exponential proposal tangent to the log density at ylo
        rho = 1.0 - (k - 1.0) / ylo if k > 1 else 1.0
        width = yhi - ylo
        while tries < max_tries:
            tries += 1
            if math.isfinite(width):
                # exponential truncated to [0, width]
                e = -math.log1p(-rng.random() * -math.expm1(-rho * width)) / rho
            else:
                e = rng.standard_exponential() / rho
            y = ylo + e
            log_acc = (k - 1.0) * math.log(y / ylo) - (1.0 - rho) * e
            if math.log(rng.random()) <= log_acc:
                return float(min(max(y / r, lo), hi)), tries - 1
    elif k > 1 and yhi <= mode:
        # left tail: exponential proposal tangent to the log density at yhi
        sigma = (k - 1.0) / yhi - 1.0
        width = yhi - ylo
        while tries < max_tries:
            tries += 1
            if sigma > 0:
                e = -math.log1p(-rng.random() * -math.expm1(-sigma * width)) / sigma
            else:
                e = rng.random() * width
            y = yhi - e
            log_acc = (k - 1.0) * math.log(y / yhi) + e + sigma * e
            if math.log(rng.random()) <= log_acc:
                return float(min(max(y / r, lo), hi)), tries - 1
    else:
        # k <= 1 near zero, or a narrow window: power-law proposal
        while tries < max_tries:
            tries += 1
            y = _power_law_draw(k, ylo, yhi, rng.random())
            if math.log(rng.random()) <= -(y - ylo):
                return float(min(max(y / r, lo), hi)), tries - 1
    raise ComputationError("truncated gamma rejection exhausted its budget",
                           diagnostics={"shape": k, "rate": r, "interval": (lo, hi)})


def _bridge_tau_interval(alpha, g: GlobalScalePrior):
    m = bridge_mean_abs_factor(alpha)
    return g.mean_abs_lo / m, g.mean_abs_hi / m, m


def _clip_bridge_tau(tau, alpha, g: GlobalScalePrior):
    """Force mean_abs_lo <= tau * m <= mean_abs_hi to hold in floating point."""
    tau_lo, tau_hi, m = _bridge_tau_interval(alpha, g)
    tau = min(max(tau, tau_lo), tau_hi)
    while tau * m < g.mean_abs_lo:
        tau = math.nextafter(tau, math.inf)
    while tau * m > g.mean_abs_hi:
        tau = math.nextafter(tau, 0.0)
    return tau


def sample_tau_bridge_collapsed(beta, alpha, prior: GlobalScalePrior, rng, *,
                                return_counts=False):
    """Collapsed draw of tau | beta under the bridge prior.

    Parameters
    ----------
    beta : array_like
        Penalized coefficients only (exclude any intercept).
    alpha : float
        Bridge exponent in (0, 1].
    prior : GlobalScalePrior
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    p = beta.size
    tau_lo, tau_hi, _ = _bridge_tau_interval(alpha, prior)
    if not tau_lo < tau_hi:
        raise ConfigurationError("empty tau interval from mean_abs bounds")
    shape = prior.shape + p / alpha
    rate = prior.rate + float(np.sum(np.abs(beta) ** alpha))
    phi_lo = tau_hi ** (-alpha)
    phi_hi = tau_lo ** (-alpha)
    phi, retries = sample_truncated_gamma(shape, rate, phi_lo, phi_hi, rng)
    tau = _clip_bridge_tau(phi ** (-1.0 / alpha), alpha, prior)
    return (tau, retries) if return_counts else tau


def _log_tau_conditional(t, beta2_over_lam2, p, prior: PriorSpec):
    """log density of tau given beta, lambda, excluding the support check."""
    g = prior.global_prior
    e = prior.global_exponent
    out = -(e * g.shape + 1.0) * math.log(t) - p * math.log(t) - 0.5 * beta2_over_lam2 / (t * t)
    if g.rate > 0:
        out -= g.rate * t ** (-e)
    return out


def sample_tau_conditional(beta, lam, prior: PriorSpec, rng, *, current=None,
                           return_counts=False):
    """Draw tau | beta, lambda restricted to [tau_min, tau_max].

    ``current`` seeds the slice sampler when one is needed (gamma rate > 0);
    it defaults to the geometric midpoint of the support.
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    if beta.shape != lam.shape:
        raise DomainError("beta and lambda lengths differ")
    lo, hi = tau_support(prior)
    if not lo < hi:
        raise ConfigurationError(f"tau support [{lo}, {hi}] is empty")
    p = beta.size
    Q = float(np.sum((beta / lam) ** 2))
    g = prior.global_prior
    e = prior.global_exponent
    if g.rate == 0.0 and e == 1.0:
        # u = tau^-2 ~ Gamma((s + p) / 2, rate Q / 2) on [hi^-2, lo^-2]
        u_lo = 0.0 if math.isinf(hi) else hi ** -2.0
        u_hi = lo ** -2.0
        u, retries = sample_truncated_gamma(0.5 * (g.shape + p), 0.5 * Q, u_lo, u_hi, rng)
        tau = min(max(u ** -0.5, lo), hi)
        return (tau, retries) if return_counts else tau
    if current is None:
        current = math.sqrt(lo * hi) if math.isfinite(hi) else lo * 10.0
    current = min(max(float(current), lo), hi)

    def logf(s):
        if s < math.log(lo) or s > math.log(hi):
            return -math.inf
        return _log_tau_conditional(math.exp(s), Q, p, prior) + s

    s_new, used = slice_sample(logf, math.log(current), rng, width=1.0, max_steps=50,
                               lower=math.log(lo), upper=math.log(hi))
    tau = min(max(math.exp(s_new), lo), hi)
    return (tau, used) if return_counts else tau


def is_bridge(prior: PriorSpec) -> bool:
    return isinstance(prior.family, Bridge)
