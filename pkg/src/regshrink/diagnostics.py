"""Chain diagnostics, interval summaries and Gaussian negative-moment utilities."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from ._quad import quad
from .errors import DomainError

__all__ = [
    "AcfResult", "EssResult", "IntervalSummary", "autocorrelation", "effective_sample_size",
    "split_rhat", "credible_interval", "coverage_width_curve", "gaussian_negative_moment",
    "gaussian_negative_moment_at_zero", "gaussian_negative_moment_closed_form", "bound_d",
    "neg_moment_bound_factor", "neg_moment_upper_bound",
    "posterior_precision_bound_holds", "kummer_m", "widest_intervals",
]

ESS_CAVEAT = ("ESS and R-hat assume a central limit theorem for the chain; without "
              "geometric ergodicity these estimates may be unreliable.")


@dataclass(frozen=True)
class AcfResult:
    values: np.ndarray
    degenerate: bool = False


def autocorrelation(draws, max_lag: int) -> AcfResult:
    """Sample autocorrelation at lags 0..max_lag (FFT, biased normalization)."""
    x = np.asarray(draws, dtype=float).ravel()
    n = x.size
    if max_lag < 1 or n <= max_lag:
        raise DomainError("need 1 <= max_lag < len(draws)")
    xc = x - x.mean()
    var = float(np.dot(xc, xc))
    if var == 0.0 or not math.isfinite(var):
        return AcfResult(np.ones(max_lag + 1), degenerate=True)
    m = 1 << int(math.ceil(math.log2(2 * n)))
    f = np.fft.rfft(xc, m)
    acov = np.fft.irfft(f * np.conj(f), m)[: max_lag + 1]
    out = acov / acov[0]
    out[0] = 1.0
    return AcfResult(out)


@dataclass(frozen=True)
class EssResult:
    ess: float
    degenerate: bool = False


def _ess_multi(chains: np.ndarray) -> EssResult:
    """Initial-monotone-sequence ESS pooled over chains (shape m x n)."""
    m, n = chains.shape
    if n < 10:
        raise DomainError("need at least 10 draws per chain")
    total = m * n
    chain_var = chains.var(axis=1, ddof=1)
    if not np.all(np.isfinite(chains)) or np.all(chain_var == 0.0):
        return EssResult(float(total), degenerate=True)
    acov = np.empty((m, n))
    for k in range(m):
        xc = chains[k] - chains[k].mean()
        L = 1 << int(math.ceil(math.log2(2 * n)))
        f = np.fft.rfft(xc, L)
        acov[k] = np.fft.irfft(f * np.conj(f), L)[:n] / n
    mean_var = chain_var.mean()
    var_plus = mean_var * (n - 1) / n
    if m > 1:
        var_plus += chains.mean(axis=1).var(ddof=1)
    rho = 1.0 - (mean_var - acov.mean(axis=0)) / var_plus
    rho[0] = 1.0
    # paired sums Gamma_k = rho_2k + rho_2k+1, truncated at the first negative
    npairs = n // 2
    pairs = rho[: 2 * npairs].reshape(npairs, 2).sum(axis=1)
    neg = np.flatnonzero(pairs < 0)
    K = neg[0] if neg.size else npairs
    g = np.minimum.accumulate(pairs[:K]) if K else np.array([1.0])
    tau_int = -1.0 + 2.0 * float(np.sum(g))
    tau_int = max(tau_int, 1.0 / math.log10(max(total, 10)))
    return EssResult(float(min(total / tau_int, total * math.log10(max(total, 10)))))


def effective_sample_size(draws) -> EssResult:
    """ESS of a single chain (1-d) or of several chains (2-d, chains x draws)."""
    x = np.asarray(draws, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    return _ess_multi(x)


def split_rhat(chains) -> float:
    """Split R-hat for an (m, n) array of chains."""
    x = np.asarray(chains, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    m, n = x.shape
    half = n // 2
    if half < 2:
        raise DomainError("need at least 4 draws per chain")
    parts = np.concatenate([x[:, :half], x[:, n - half:]], axis=0)
    W = parts.var(axis=1, ddof=1).mean()
    B = half * parts.mean(axis=1).var(ddof=1)
    if W == 0.0:
        return 1.0 if B == 0.0 else math.inf
    var_plus = (half - 1) / half * W + B / half
    return float(math.sqrt(var_plus / W))


@dataclass(frozen=True)
class IntervalSummary:
    mean: float
    median: float
    lo: float
    hi: float
    level: float
    covers_truth: Optional[bool] = None

    @property
    def width(self) -> float:
        return self.hi - self.lo


def credible_interval(draws, level: float = 0.95, truth: Optional[float] = None
                      ) -> IntervalSummary:
    """Equal-tailed interval with type-7 (linear interpolation) quantiles."""
    x = np.asarray(draws, dtype=float).ravel()
    if not (0.0 < level < 1.0):
        raise DomainError("level must lie in (0, 1)")
    if x.size < 100:
        raise DomainError("need at least 100 draws")
    q = (1.0 - level) / 2.0
    lo, med, hi = np.quantile(x, [q, 0.5, 1.0 - q], method="linear")
    covers = None if truth is None else bool(lo <= truth <= hi)
    return IntervalSummary(float(x.mean()), float(med), float(lo), float(hi), float(level), covers)


def coverage_width_curve(draw_sets: Sequence, truths, levels, signal_mask=None):
    """Mean interval width and coverage per level.

    Returns a list of dicts with keys ``level``, ``group``, ``mean_width``,
    ``coverage`` and ``count``; ``group`` is "all" or, when a signal mask is
    given, also "signal" and "null".
    """
    truths = np.asarray(truths, dtype=float)
    if len(draw_sets) != truths.size:
        raise DomainError("draw_sets and truths differ in length")
    groups = {"all": np.ones(truths.size, dtype=bool)}
    if signal_mask is not None:
        mask = np.asarray(signal_mask, dtype=bool)
        if mask.shape != truths.shape:
            raise DomainError("signal_mask has the wrong length")
        groups["signal"] = mask
        groups["null"] = ~mask
    rows = []
    for level in levels:
        ivs = [credible_interval(d, level, t) for d, t in zip(draw_sets, truths)]
        width = np.array([iv.width for iv in ivs])
        cov = np.array([iv.covers_truth for iv in ivs], dtype=float)
        for name, g in groups.items():
            if not g.any():
                continue
            rows.append({"level": float(level), "group": name,
                         "mean_width": float(width[g].mean()),
                         "coverage": float(cov[g].mean()), "count": int(g.sum())})
    return rows


def widest_intervals(draws, k: int, level: float = 0.95):
    """Indices of the ``k`` coordinates with the widest intervals, widest first."""
    draws = np.asarray(draws, dtype=float)
    widths = np.array([credible_interval(draws[:, j], level).width
                       for j in range(draws.shape[1])])
    return np.argsort(-widths, kind="stable")[:k]


# Gaussian negative moments ---------------------------------------------------


def gaussian_negative_moment_at_zero(sigma, alpha_exp) -> float:
    """E|beta|^-a for beta ~ N(0, sigma^2): sigma^-a Gamma((1-a)/2) / (2^(a/2) sqrt(pi))."""
    a = float(alpha_exp)
    return float(sigma) ** (-a) * special.gamma((1.0 - a) / 2.0) / (2.0 ** (a / 2.0)
                                                                     * math.sqrt(math.pi))


def gaussian_negative_moment(mu, sigma, alpha_exp) -> float:
    """E|beta|^-a for beta ~ N(mu, sigma^2) by quadrature.

    The substitution |beta| = sigma r^(1/(1-a)) removes the singularity at 0.
    """
    a = float(alpha_exp)
    if not (sigma > 0):
        raise DomainError("sigma must be positive")
    if not (0.0 <= a < 1.0):
        raise DomainError("alpha_exp must lie in [0, 1)")
    if a == 0.0:
        return 1.0
    m = abs(float(mu)) / float(sigma)
    k = 1.0 / (1.0 - a)

    def f(r):
        # density of |z| at t = r^k times t^-a dt/dr, with dt/dr t^-a = k
        t = r ** k
        return k * (math.exp(-0.5 * (t - m) ** 2) + math.exp(-0.5 * (t + m) ** 2)) \
            / math.sqrt(2.0 * math.pi)

    hi = (m + 40.0) ** (1.0 / k)
    pts = [x ** (1.0 / k) for x in (max(m - 8, 0.0), m, m + 8) if 0 < x ** (1.0 / k) < hi]
    val = quad(f, 0.0, hi, points=sorted(set(pts)) or None, epsabs=0.0, epsrel=1e-11)
    return float(sigma) ** (-a) * val


def neg_moment_bound_factor(alpha_exp) -> float:
    """C_a = Gamma((1-a)/2) / (2^(a/2) sqrt(pi))."""
    return gaussian_negative_moment_at_zero(1.0, alpha_exp)


def kummer_m(a, b, z) -> float:
    """Confluent hypergeometric M(a, b, z)."""
    return float(special.hyp1f1(a, b, z))


def bound_d(t, alpha_exp) -> float:
    """Decaying factor D(t) in the negative-moment bound, O(|t|^-a); inf at t = 0."""
    a = float(alpha_exp)
    t = abs(float(t))
    if t == 0.0:
        return math.inf
    first = 2.0 ** (2.5 - a) / (1.0 - a) * math.exp(-t * t / 4.0)
    second = 2.0 ** (0.5 + a) * special.gamma(a / 2.0) * t ** (-a)
    return (first + second) / special.beta(a / 2.0, (1.0 - a) / 2.0)


def gaussian_negative_moment_closed_form(mu, sigma, alpha_exp) -> float:
    """C_a sigma^-a M(a/2, 1/2, -mu^2 / 2 sigma^2)."""
    a = float(alpha_exp)
    t2 = (float(mu) / float(sigma)) ** 2
    return neg_moment_bound_factor(a) * float(sigma) ** (-a) * kummer_m(a / 2.0, 0.5, -t2 / 2.0)


def neg_moment_upper_bound(mu, sigma, alpha_exp) -> float:
    """C_a sigma^-a min{1, D(mu / sigma)}."""
    t = abs(float(mu)) / float(sigma)
    return neg_moment_bound_factor(alpha_exp) * float(sigma) ** (-alpha_exp) * min(
        1.0, bound_d(t, alpha_exp))


def posterior_precision_bound_holds(X, omega, tau, lam, zeta, alpha_exp) -> np.ndarray:
    """Per-coordinate check of the bound on diag(Phi^-1)^(-a/2).

    With sigma_j^2 = diag(Phi^-1)_j, returns the boolean array
    sigma_j^-a <= (tau lam_j)^-a + zeta^-a + 1 - a/2 + (a/2) sum_i omega_i x_ij^2.
    """
    X = np.asarray(X, dtype=float)
    omega = np.asarray(omega, dtype=float)
    lam = np.asarray(lam, dtype=float)
    a = float(alpha_exp)
    Phi = (X.T * omega) @ X + np.diag(zeta ** -2.0 + (tau * lam) ** -2.0)
    sig2 = np.diag(np.linalg.inv(Phi))
    lhs = sig2 ** (-a / 2.0)
    rhs = (tau * lam) ** (-a) + zeta ** (-a) + 1.0 - a / 2.0 + (a / 2.0) * (omega @ X ** 2)
    return lhs <= rhs
