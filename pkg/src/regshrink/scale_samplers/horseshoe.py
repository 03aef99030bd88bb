"""Rejection sampler for the horseshoe local-scale conditional.

With eta = lambda^-2 and b = beta^2 / (2 tau^2) the conditional is
pi(eta) proportional to (1 + eta)^-1 exp(-b eta).  On psi = log(1 + eta) the
target becomes f_b(psi) = exp(-b e^psi) on psi >= 0, which is dominated by

* b >= 1:  g_b(psi) = exp(-b (1 + psi)), an Exp(rate b) shape;
* b < 1:   a flat piece exp(-b) on [0, L], L = log(1/b), followed by
           exp(-1 - (psi - L)) on [L, inf).

The acceptance probability stays bounded away from zero and tends to one
as b -> 0 or b -> inf.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .._quad import quad
from ..errors import DomainError


def _check_b(b):
    b = np.asarray(b, dtype=float)
    if np.any(~(b > 0)) or np.any(~np.isfinite(b)):
        raise DomainError("b must be positive and finite")
    return b


@dataclass(frozen=True)
class HorseshoeEnvelope:
    """Piecewise envelope g_b for the target f_b(psi) = exp(-b e^psi)."""

    b: float
    branch: str
    uniform_weight: float

    @classmethod
    def from_b(cls, b: float) -> "HorseshoeEnvelope":
        b = float(_check_b(b))
        if b >= 1.0:
            return cls(b, "b_ge_1", 0.0)
        L = -math.log(b)
        return cls(b, "b_lt_1", L / (L + math.exp(b - 1.0)))

    def log_target(self, psi):
        psi = np.asarray(psi, dtype=float)
        return -self.b * np.exp(psi)

    def log_envelope(self, psi):
        psi = np.asarray(psi, dtype=float)
        if self.branch == "b_ge_1":
            return -self.b * (1.0 + psi)
        L = -math.log(self.b)
        return np.where(psi <= L, -self.b, -1.0 - (psi - L))

    def log_mass(self) -> float:
        """log of the integral of g_b over psi >= 0."""
        if self.branch == "b_ge_1":
            return -self.b - math.log(self.b)
        L = -math.log(self.b)
        return math.log(L * math.exp(-self.b) + math.exp(-1.0))

    def sample(self, rng, size=None):
        """Propose psi from g_b."""
        b = self.b
        if self.branch == "b_ge_1":
            return rng.standard_exponential(size) / b
        L = -math.log(b)
        flat = rng.random(size) < self.uniform_weight
        return np.where(flat, L * rng.random(size), L + rng.standard_exponential(size))


def _propose_and_test(b, rng):
    """One vectorized proposal round; returns (psi, accepted)."""
    k = b.size
    big = b >= 1.0
    psi = np.empty(k)
    log_acc = np.empty(k)
    e = rng.standard_exponential(k)
    if np.any(big):
        bb = b[big]
        x = e[big] / bb
        psi[big] = x
        log_acc[big] = -bb * (np.expm1(x) - x)
    small = ~big
    if np.any(small):
        bs = b[small]
        L = -np.log(bs)
        w = L / (L + np.exp(bs - 1.0))
        flat = rng.random(bs.size) < w
        u = rng.random(bs.size)
        x = np.where(flat, L * u, L + e[small])
        t = x - L
        psi[small] = x
        log_acc[small] = np.where(flat, -bs * np.expm1(x), -np.expm1(t) + t)
    v = rng.random(k)
    return psi, np.log(v) <= log_acc


def sample_horseshoe_psi(b, rng, *, return_proposals=False):
    """Draw psi = log(1 + eta), vectorized over ``b``."""
    b_arr = _check_b(b)
    flat_b = b_arr.ravel()
    out = np.empty(flat_b.size)
    pending = np.arange(flat_b.size)
    proposals = 0
    while pending.size:
        proposals += pending.size
        psi, ok = _propose_and_test(flat_b[pending], rng)
        out[pending[ok]] = psi[ok]
        pending = pending[~ok]
    out = out.reshape(b_arr.shape)
    value = float(out) if b_arr.ndim == 0 else out
    return (value, proposals) if return_proposals else value


def sample_horseshoe_eta(b, rng, *, return_proposals=False):
    """Draw eta from pi(eta) proportional to (1 + eta)^-1 exp(-b eta)."""
    psi, used = sample_horseshoe_psi(b, rng, return_proposals=True)
    eta = np.expm1(psi)
    value = float(eta) if np.ndim(eta) == 0 else eta
    return (value, used) if return_proposals else value


def horseshoe_proposal_trial(b: float, n_proposals: int, rng) -> int:
    """Run ``n_proposals`` independent proposals at ``b``; return accept count."""
    bb = np.full(int(n_proposals), float(_check_b(b)))
    _, ok = _propose_and_test(bb, rng)
    return int(np.count_nonzero(ok))


def sample_horseshoe_local(beta, tau, rng, *, return_proposals=False):
    """Draw lambda_j | beta_j, tau for horseshoe local scales."""
    beta = np.asarray(beta, dtype=float)
    b = 0.5 * (beta / tau) ** 2
    b = np.maximum(b, np.finfo(float).tiny)
    eta, used = sample_horseshoe_eta(b, rng, return_proposals=True)
    eta = np.maximum(eta, np.finfo(float).tiny)
    lam = 1.0 / np.sqrt(eta)
    return (lam, used) if return_proposals else lam


def _scaled_target_mass(b: float) -> float:
    """e^b times the integral of f_b over psi >= 0, by quadrature."""
    def g(psi):
        if psi > 700.0:
            return 0.0
        return math.exp(-b * math.expm1(psi))

    if b >= 1.0:
        edges = [0.0, 1.0 / b, 4.0 / b, 16.0 / b, 64.0 / b]
    else:
        L = -math.log(b)
        edges = [0.0, 0.5 * L, L, L + 1.0, L + 3.0, L + 6.0]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += quad(g, lo, hi, epsabs=0.0)
    # the tail is negligible; judge its accuracy against the bulk
    total += quad(g, edges[-1], math.inf, epsabs=1e-14 * total)
    return total


def horseshoe_acceptance_rate(b: float) -> float:
    """Acceptance probability int f_b / int g_b by adaptive quadrature."""
    b = float(_check_b(b))
    env = HorseshoeEnvelope.from_b(b)
    log_num = math.log(_scaled_target_mass(b)) - b
    return math.exp(log_num - env.log_mass())


def _scaled_exp1(b: float) -> float:
    """e^b E1(b) without overflow."""
    if b < 50.0:
        return math.exp(b) * float(special.exp1(b))
    # asymptotic series, truncated at its smallest term
    term, total, n = 1.0 / b, 0.0, 0
    while n < 40:
        total += term
        nxt = -term * (n + 1) / b
        if abs(nxt) >= abs(term):
            break
        term = nxt
        n += 1
    return total


def horseshoe_acceptance_closed_form(b: float) -> float:
    """Closed form of the acceptance probability via the exponential integral."""
    b = float(_check_b(b))
    if b >= 1.0:
        return b * _scaled_exp1(b)
    L = -math.log(b)
    return float(special.exp1(b)) / (math.exp(-b) * L + math.exp(-1.0))
