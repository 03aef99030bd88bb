"""Data model and prior densities for regularized global-local shrinkage.

Coefficients follow beta_j | tau, lambda_j ~ N(0, tau^2 lambda_j^2), and a
Gaussian slab of width zeta is imposed through fictitious observations
z_j = 0 ~ N(beta_j, zeta^2).  The slab leaves the (tau, lambda) conditional
untouched and turns the beta prior variance into
(zeta^-2 + tau^-2 lambda^-2)^-1.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from scipy import special

from .errors import ConfigurationError, DomainError
from .stable import positive_stable_logpdf

LOG_2_OVER_PI = math.log(2.0 / math.pi)


def _readonly(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Design matrix and binary outcomes.

    When ``has_intercept`` is set, column 0 of ``X`` must be all ones; that
    coordinate gets the slab-only intercept prior.
    """

    X: np.ndarray
    y: np.ndarray
    has_intercept: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise DomainError("X must be a 2-d array")
        if y.ndim != 1 or y.shape[0] != X.shape[0]:
            raise DomainError(f"y has shape {y.shape}, expected ({X.shape[0]},)")
        if X.shape[1] < 1:
            raise DomainError("X needs at least one column")
        if not np.all(np.isfinite(X)):
            raise DomainError("X contains non-finite entries")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise DomainError("y entries must be 0 or 1")
        if self.has_intercept and not np.all(X[:, 0] == 1.0):
            raise DomainError("has_intercept is set but column 0 is not all ones")
        object.__setattr__(self, "X", _readonly(X))
        object.__setattr__(self, "y", _readonly(y))
        object.__setattr__(self, "has_intercept", bool(self.has_intercept))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def penalized(self) -> np.ndarray:
        """Boolean mask of coordinates carrying a local scale."""
        mask = np.ones(self.p, dtype=bool)
        if self.has_intercept:
            mask[0] = False
        return mask


@dataclass(frozen=True)
class Bridge:
    """Bridge prior, marginal density proportional to exp(-|beta/tau|^alpha)."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise ConfigurationError(f"bridge exponent must lie in (0, 1], got {self.alpha}")

    name = "bridge"


@dataclass(frozen=True)
class Horseshoe:
    """Half-Cauchy local scales."""

    name = "horseshoe"


Family = Union[Bridge, Horseshoe]


@dataclass(frozen=True)
class GlobalScalePrior:
    """Gamma(shape, rate) prior on phi = tau^-a plus support restrictions.

    ``a`` is the bridge exponent for the bridge family and 1 otherwise, so
    shape = rate = 0 is the reference prior proportional to 1/tau in both
    cases.  The bridge update restricts tau through E[|beta| | tau] in
    [mean_abs_lo, mean_abs_hi]; other families use [tau_min, tau_max].
    """

    shape: float = 0.0
    rate: float = 0.0
    mean_abs_lo: float = 1e-6
    mean_abs_hi: float = 1.0
    tau_min: float = 1e-6
    tau_max: float = 1e3

    def __post_init__(self):
        if self.shape < 0 or self.rate < 0:
            raise ConfigurationError("global prior shape and rate must be non-negative")
        if not (0.0 < self.mean_abs_lo < self.mean_abs_hi < math.inf):
            raise ConfigurationError("need 0 < mean_abs_lo < mean_abs_hi < inf")
        if not (0.0 < self.tau_min <= self.tau_max <= math.inf):
            raise ConfigurationError("need 0 < tau_min <= tau_max <= inf")


@dataclass(frozen=True)
class PriorSpec:
    family: Family
    slab_width: float = 1.0
    global_prior: GlobalScalePrior = field(default_factory=GlobalScalePrior)
    intercept_slab: float = 10.0

    def __post_init__(self):
        if not isinstance(self.family, (Bridge, Horseshoe)):
            raise ConfigurationError(f"unknown prior family {self.family!r}")
        if not (0.0 < self.slab_width < math.inf):
            raise ConfigurationError("slab width must be positive and finite")
        if not (self.intercept_slab > 0.0):
            raise ConfigurationError("intercept slab must be positive (inf allowed)")

    @property
    def global_exponent(self) -> float:
        return self.family.alpha if isinstance(self.family, Bridge) else 1.0


@dataclass
class ModelState:
    beta: np.ndarray
    lam: np.ndarray
    tau: float
    omega: Optional[np.ndarray] = None

    def validate(self):
        bad = []
        if not np.all(np.isfinite(self.beta)):
            bad.append("beta")
        if not (np.all(np.isfinite(self.lam)) and np.all(self.lam > 0)):
            bad.append("lambda")
        if not (math.isfinite(self.tau) and self.tau > 0):
            bad.append("tau")
        if self.omega is not None and not (
                np.all(np.isfinite(self.omega)) and np.all(self.omega > 0)):
            bad.append("omega")
        return bad

    def copy(self) -> "ModelState":
        return ModelState(
            beta=np.array(self.beta, dtype=float),
            lam=np.array(self.lam, dtype=float),
            tau=float(self.tau),
            omega=None if self.omega is None else np.array(self.omega, dtype=float),
        )


def _positive(name, x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)) or np.any(np.isnan(arr)):
        raise DomainError(f"{name} must be positive, got {x!r}")
    return arr


def regularized_conditional_variance(tau, lam, zeta):
    """Prior variance of beta after the slab: (zeta^-2 + tau^-2 lam^-2)^-1."""
    tau = _positive("tau", tau)
    lam = _positive("lam", lam)
    zeta = _positive("zeta", zeta)
    s2 = (tau * lam) ** 2
    z2 = zeta ** 2
    with np.errstate(invalid="ignore"):
        out = np.where(np.isinf(s2), z2, np.where(np.isinf(z2), s2, s2 * z2 / (s2 + z2)))
    return float(out) if out.ndim == 0 else out


def bridge_mean_abs_factor(alpha: float) -> float:
    """E[|beta| | tau] / tau under the bridge prior, Gamma(2/a) / Gamma(1/a)."""
    return math.exp(special.gammaln(2.0 / alpha) - special.gammaln(1.0 / alpha))


def bridge_neg_half_moment(alpha: float) -> float:
    """E[S^-1/2] for the positive stable law of index alpha/2."""
    return math.exp(special.gammaln(1.0 + 1.0 / alpha) - special.gammaln(1.5))


@functools.lru_cache(maxsize=8192)
def _bridge_log_local(lam: float, alpha: float) -> float:
    # each value costs a stable-density quadrature; grids revisit the same points
    a = alpha / 2.0
    const = 0.5 * math.log(2.0) - math.log(bridge_neg_half_moment(alpha))
    return const - 2.0 * math.log(lam) + positive_stable_logpdf(
        None, a, logx=-math.log(2.0) - 2.0 * math.log(lam))


def log_local_prior(lam, family: Family):
    """Normalized log pi_loc(lambda).

    Horseshoe: (2/pi) / (1 + lambda^2).  Bridge: the mixing density that
    makes beta / tau have marginal proportional to exp(-|.|^alpha),
    sqrt(2) lambda^-2 f(lambda^-2 / 2) / E[S^-1/2] with f the positive stable
    density of index alpha/2.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(~(lam_arr > 0)):
        raise DomainError("local scales must be positive")
    if isinstance(family, Horseshoe):
        out = LOG_2_OVER_PI - np.log1p(lam_arr ** 2)
        return float(out) if out.ndim == 0 else out
    if isinstance(family, Bridge):
        if family.alpha == 1.0:
            # Laplace mixing: lambda^2 ~ Exp(rate 1/2)
            out = np.log(lam_arr) - 0.5 * lam_arr ** 2
            return float(out) if out.ndim == 0 else out
        flat = lam_arr.ravel()
        vals = np.array([_bridge_log_local(float(l), float(family.alpha)) for l in flat])
        out = vals.reshape(lam_arr.shape)
        return float(out) if out.ndim == 0 else out
    raise ConfigurationError(f"unknown family {family!r}")


def log_global_prior(tau, prior: PriorSpec) -> float:
    """log pi_glo(tau) up to a constant, -inf outside the support."""
    tau = float(tau)
    if not tau > 0:
        raise DomainError("tau must be positive")
    lo, hi = tau_support(prior)
    if tau < lo or tau > hi:
        return -math.inf
    g = prior.global_prior
    e = prior.global_exponent
    out = -(e * g.shape + 1.0) * math.log(tau)
    if g.rate > 0:
        out -= g.rate * tau ** (-e)
    return out


def tau_support(prior: PriorSpec):
    """Support interval of tau implied by the global prior settings."""
    g = prior.global_prior
    if isinstance(prior.family, Bridge):
        m = bridge_mean_abs_factor(prior.family.alpha)
        return g.mean_abs_lo / m, g.mean_abs_hi / m
    return g.tau_min, g.tau_max


def scale_conditional_logdensity(tau, lam, beta, prior: PriorSpec) -> float:
    """log of pi_glo(tau) prod_j (tau lam_j)^-1 exp(-beta_j^2 / 2 tau^2 lam_j^2) pi_loc(lam_j)."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if lam.shape != beta.shape:
        raise DomainError("lam and beta must have the same length")
    if np.any(~(lam > 0)):
        raise DomainError("local scales must be positive")
    tau = float(tau)
    if not tau > 0:
        raise DomainError("tau must be positive")
    s = tau * lam
    out = log_global_prior(tau, prior)
    out += float(np.sum(-np.log(s) - 0.5 * (beta / s) ** 2))
    out += float(np.sum(log_local_prior(lam, prior.family)))
    return out


def bridge_marginal_logdensity(beta, tau, alpha):
    """-log tau - |beta / tau|^alpha."""
    tau = float(tau)
    if not tau > 0:
        raise DomainError("tau must be positive")
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    out = -math.log(tau) - np.abs(np.asarray(beta, dtype=float) / tau) ** alpha
    return float(out) if np.ndim(out) == 0 else out


def regularized_joint_logdensity(beta, lam, tau, zeta, prior: PriorSpec) -> float:
    """Joint log-density of (beta, lambda) given tau under the slab-regularized prior.

    Written as N(beta; 0, v) (1 + tau^2 lam^2 / zeta^2)^-1/2 pi_loc(lam) with
    v the regularized conditional variance.  Up to a constant this equals
    exp(-beta^2 / 2 zeta^2) N(beta; 0, tau^2 lam^2) pi_loc(lam).
    """
    lam = float(_positive("lam", lam))
    tau = float(_positive("tau", tau))
    zeta = float(_positive("zeta", zeta))
    beta = float(beta)
    v = regularized_conditional_variance(tau, lam, zeta)
    out = -0.5 * math.log(2 * math.pi * v) - 0.5 * beta * beta / v
    if math.isfinite(zeta):
        out -= 0.5 * math.log1p((tau * lam / zeta) ** 2)
    return out + float(log_local_prior(lam, prior.family))

