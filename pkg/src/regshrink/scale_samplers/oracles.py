"""Quadrature oracles for local and global scale conditionals.

These are slow, deterministic reference computations used by tests and the
acceptance suite.  The local conditional is

    pi(lambda | beta, tau) proportional to lambda^-1 exp(-x^2 / 2 lambda^2) pi_loc(lambda),

with x = beta / tau.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import special

from .._quad import quad, quad_log_interval
from ..errors import ComputationError, DomainError
from ..model import Bridge, Horseshoe, PriorSpec, bridge_mean_abs_factor, log_local_prior
from ..stable import positive_stable_logpdf

# Local conditional ---------------------------------------------------------


def _local_logkernel(lam, x, family):
    if lam <= 0.0 or not math.isfinite(lam):
        return -math.inf
    q = abs(x) / lam
    if q > 1e150:
        return -math.inf
    return -math.log(lam) - 0.5 * q * q + float(log_local_prior(lam, family))


def _local_breaks(x):
    pts = [1.0]
    ax = abs(x)
    if ax > 0:
        pts += [ax * 0.1, ax, ax * 10.0]
    return sorted(set(p for p in pts if p > 0))


def _local_integral(x, family, lo, hi, power=0.0):
    """Integral of lambda^-power times the local kernel over [lo, hi]."""
    x = float(x)

    def f(lam):
        v = _local_logkernel(lam, x, family)
        if v == -math.inf:
            return 0.0
        v -= power * math.log(lam)
        return math.exp(v) if v > -745 else 0.0

    return quad_log_interval(f, lo, hi, points=_local_breaks(x), epsabs=0.0)


def local_scale_tail_prob(a, beta, tau, prior: PriorSpec) -> float:
    """P(lambda >= a | beta, tau) by adaptive quadrature."""
    if not (a > 0 and tau > 0):
        raise DomainError("a and tau must be positive")
    x = float(beta) / float(tau)
    fam = prior.family
    upper = _local_integral(x, fam, a, math.inf)
    lower = _local_integral(x, fam, 0.0, a)
    total = upper + lower
    if not total > 0:
        raise ComputationError("local conditional normalizer vanished",
                               diagnostics={"x": x, "a": a})
    return upper / total


def local_scale_cdf(grid, beta_over_tau, family):
    """CDF of lambda | beta, tau on an increasing grid of lambda values."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise DomainError("grid must be positive and strictly increasing")
    x = float(beta_over_tau)
    edges = [0.0, *grid.tolist(), math.inf]
    pieces = np.array([_local_integral(x, family, edges[i], edges[i + 1])
                       for i in range(len(edges) - 1)])
    cum = np.cumsum(pieces)
    return cum[:-1] / cum[-1]


def local_scale_limit_cdf(grid, family):
    """CDF of the normalized lambda^-1 pi_loc(lambda) (the beta -> 0 limit)."""
    return local_scale_cdf(grid, 0.0, family)


def local_scale_neg_moment(alpha_exp, beta, tau, prior: PriorSpec) -> float:
    """E[tau^-a lambda^-a | tau, beta] by quadrature, a = alpha_exp in [0, 1)."""
    if not (0.0 <= alpha_exp < 1.0):
        raise DomainError("alpha_exp must lie in [0, 1)")
    if alpha_exp == 0.0:
        return 1.0
    x = float(beta) / float(tau)
    fam = prior.family
    num = _local_integral(x, fam, 0.0, math.inf, power=alpha_exp)
    den = _local_integral(x, fam, 0.0, math.inf)
    return float(tau) ** (-alpha_exp) * num / den


def lemma_neg_moment_bound(alpha_exp, beta, tau, sup_ratio=1.0, eps=1.0) -> float:
    """Upper bound C'' |beta|^-a / log(1 + 4 tau^2 eps^2 / beta^2) on E[(tau lambda)^-a].

    C'' = 2^(2 + a/2) (sup pi_loc / pi_loc(0)) Gamma(a/2) / 2; ``eps`` must
    satisfy min over [0, eps] of pi_loc >= pi_loc(0) / 2.  For the horseshoe
    sup_ratio = 1 and eps = 1.
    """
    a = float(alpha_exp)
    c2 = 2.0 ** (2.0 + a / 2.0) * sup_ratio * 0.5 * special.gamma(a / 2.0)
    b = abs(float(beta))
    return c2 * b ** (-a) / math.log1p(4.0 * tau * tau * eps * eps / (b * b))


def bridge_limit_tv(beta_over_tau, alpha) -> float:
    """Total variation between pi(lambda | beta, tau) and its beta -> 0 limit.

    On psi = lambda^-2 / 2 the limit is the untilted stable law f and the
    conditional is exp(t^a - t psi) f(psi) with t = x^2, a = alpha / 2, so
    TV = int over psi > t^(a-1) of f(psi) (1 - exp(t^a - t psi)).
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError("alpha must lie in (0, 1)")
    a = alpha / 2.0
    t = float(beta_over_tau) ** 2
    if t == 0.0:
        return 0.0
    ta = t ** a
    s_star = ta / t

    def f(psi):
        lf = positive_stable_logpdf(psi, a)
        return math.exp(lf) * -math.expm1(ta - t * psi) if math.isfinite(lf) else 0.0

    return quad_log_interval(f, s_star, math.inf, points=[s_star * 10.0, 1.0 / t],
                             epsabs=0.0)


def bridge_local_small_lambda_slope(alpha, lam_lo=1e-4, lam_hi=1e-2, n=25) -> float:
    """Least-squares slope of log pi_loc(lambda) against log lambda."""
    lam = np.geomspace(lam_lo, lam_hi, n)
    lp = np.asarray(log_local_prior(lam, Bridge(alpha)))
    return float(np.polyfit(np.log(lam), lp, 1)[0])


# Horseshoe eta oracle --------------------------------------------------------


def horseshoe_eta_cdf(eta, b):
    """CDF of pi(eta) proportional to (1 + eta)^-1 exp(-b eta), by quadrature."""
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    b = float(b)

    def f(e):
        return math.exp(-b * e) / (1.0 + e)

    scale = 1.0 / b
    total = quad_log_interval(f, 0.0, math.inf, points=[min(1.0, scale), scale],
                              epsabs=0.0)
    order = np.argsort(eta)
    out = np.empty(eta.size)
    acc, prev = 0.0, 0.0
    for i in order:
        e = max(float(eta[i]), 0.0)
        if e > prev:
            acc += quad_log_interval(f, prev, e, points=[min(1.0, scale), scale], epsabs=0.0)
            prev = e
        out[i] = acc / total
    return out


# Global scale grid oracles ---------------------------------------------------


def tau_grid_oracle(logdens, lo, hi, n=20001):
    """Normalized density and CDF of tau on a log grid.

    ``logdens(tau)`` is the unnormalized log density on the tau scale; the
    grid is uniform in log tau and integration uses the trapezoid rule in
    log tau with the Jacobian included.
    """
    s = np.linspace(math.log(lo), math.log(hi), n)
    tau = np.exp(s)
    lw = np.array([logdens(t) for t in tau]) + s
    lw -= lw.max()
    w = np.exp(lw)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(s))])
    cdf = cum / cum[-1]
    return tau, cdf


def bridge_tau_logdensity(beta, alpha, shape=0.0, rate=0.0):
    """Unnormalized log density of tau | beta under the bridge, collapsed over lambda."""
    beta = np.abs(np.atleast_1d(np.asarray(beta, dtype=float)))
    p = beta.size
    sb = float(np.sum(beta ** alpha))

    def logd(tau):
        out = -(alpha * shape + 1.0) * math.log(tau) - p * math.log(tau) - sb * tau ** (-alpha)
        if rate > 0:
            out -= rate * tau ** (-alpha)
        return out

    return logd


def bridge_tau_bounds(alpha, mean_abs_lo, mean_abs_hi):
    m = bridge_mean_abs_factor(alpha)
    return mean_abs_lo / m, mean_abs_hi / m


def horseshoe_tau_logdensity(beta, lam, shape=0.0, rate=0.0):
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    p = beta.size
    Q = float(np.sum((beta / lam) ** 2))

    def logd(tau):
        out = -(shape + 1.0) * math.log(tau) - p * math.log(tau) - 0.5 * Q / tau ** 2
        if rate > 0:
            out -= rate / tau
        return out

    return logd


def ks_against_grid(draws, grid, cdf):
    """Kolmogorov-Smirnov distance between draws and a tabulated CDF."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = x.size
    F = np.interp(x, grid, cdf)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


__all__ = [
    "local_scale_tail_prob", "local_scale_cdf", "local_scale_limit_cdf",
    "local_scale_neg_moment", "lemma_neg_moment_bound", "bridge_limit_tv",
    "bridge_local_small_lambda_slope", "horseshoe_eta_cdf", "tau_grid_oracle",
    "bridge_tau_logdensity", "bridge_tau_bounds", "horseshoe_tau_logdensity",
    "ks_against_grid",
]
