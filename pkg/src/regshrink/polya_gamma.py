"""Exact Polya-Gamma PG(1, c) generation.

Draws J*(1, z) with z = |c| / 2 by Devroye-style alternating-series
rejection: the proposal is an exponential piece beyond the truncation point
t = 0.64 and a truncated inverse-Gaussian piece below it, both tilted by z,
so the method stays exact and efficient for large |c|.  PG(1, c) = J*(1, c/2) / 4.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

_T = 0.64
_PI2_8 = np.pi ** 2 / 8.0


@dataclass(frozen=True)
class PgDraw:
    value: float
    c: float

    def __post_init__(self):
        if not (self.value > 0 and np.isfinite(self.value)):
            raise ValueError("Polya-Gamma draw must be positive and finite")


def pg_mean(c):
    """E[omega] for omega ~ PG(1, c): tanh(c/2) / (2c), 1/4 at c = 0."""
    c = np.abs(np.asarray(c, dtype=float))
    small = c < 1e-4
    cs = np.where(small, 1.0, c)
    out = np.where(small, 0.25 * (1.0 - c * c / 12.0), np.tanh(cs / 2.0) / (2.0 * cs))
    return float(out) if out.ndim == 0 else out


def _a_coef(n, x):
    """Alternating-series coefficient a_n(x) of the J*(1) density."""
    k = n + 0.5
    with np.errstate(divide="ignore", over="ignore"):
        left = np.pi * k * (2.0 / (np.pi * x)) ** 1.5 * np.exp(-2.0 * k * k / x)
    right = np.pi * k * np.exp(-0.5 * k * k * np.pi ** 2 * x)
    return np.where(x <= _T, left, right)


def _truncated_ig(z, rng):
    """Inverse-Gaussian(mean 1/z, shape 1) restricted to (0, t)."""
    out = np.empty(z.size)
    mu = np.where(z > 0, 1.0 / np.maximum(z, 1e-300), np.inf)
    small = mu > _T
    idx = np.flatnonzero(small)
    while idx.size:
        # mean above t: X = t / (1 + t E)^2 accepted against the Levy bound
        e = rng.standard_exponential(idx.size)
        e2 = rng.standard_exponential(idx.size)
        ok = e * e <= 2.0 * e2 / _T
        x = _T / (1.0 + _T * e) ** 2
        u = rng.random(idx.size)
        ok &= u <= np.exp(-0.5 * z[idx] ** 2 * x)
        out[idx[ok]] = x[ok]
        idx = idx[~ok]
    idx = np.flatnonzero(~small)
    while idx.size:
        m = mu[idx]
        y = rng.standard_normal(idx.size) ** 2
        x = m + 0.5 * m * m * y - 0.5 * m * np.sqrt(4.0 * m * y + (m * y) ** 2)
        u = rng.random(idx.size)
        x = np.where(u > m / (m + x), m * m / x, x)
        ok = x <= _T
        out[idx[ok]] = x[ok]
        idx = idx[~ok]
    return out


def _mixture_weight(z):
    """Probability of the exponential piece, p / (p + q)."""
    K = _PI2_8 + 0.5 * z * z
    log_p = np.log(np.pi / (2.0 * K)) - K * _T
    rt = np.sqrt(1.0 / _T)
    a = rt * (_T * z - 1.0)
    b = -rt * (_T * z + 1.0)
    log_q = np.logaddexp(np.log(2.0) - z + special.log_ndtr(a),
                         np.log(2.0) + z + special.log_ndtr(b))
    return special.expit(log_p - log_q), K


def _jstar(z, rng):
    """Vectorized J*(1, z) draws; returns (draws, proposals used)."""
    n = z.size
    out = np.empty(n)
    w_exp, K = _mixture_weight(z)
    pending = np.arange(n)
    proposals = 0
    while pending.size:
        proposals += pending.size
        zp = z[pending]
        use_exp = rng.random(pending.size) < w_exp[pending]
        x = np.empty(pending.size)
        ie = np.flatnonzero(use_exp)
        x[ie] = _T + rng.standard_exponential(ie.size) / K[pending][ie]
        ii = np.flatnonzero(~use_exp)
        if ii.size:
            x[ii] = _truncated_ig(zp[ii], rng)
        s = _a_coef(0, x)
        y = rng.random(pending.size) * s
        accepted = np.zeros(pending.size, dtype=bool)
        live = np.arange(pending.size)
        k = 0
        while live.size:
            k += 1
            ak = _a_coef(k, x[live])
            if k % 2 == 1:
                s[live] -= ak
                hit = y[live] <= s[live]
                accepted[live[hit]] = True
                live = live[~hit]
            else:
                s[live] += ak
                miss = y[live] > s[live]
                live = live[~miss]
        out[pending[accepted]] = x[accepted]
        pending = pending[~accepted]
    return out, proposals


def sample_pg1(c, rng, *, return_proposals=False):
    """Draw omega ~ PG(1, c), elementwise over ``c``.

    Parameters
    ----------
    c : float or array_like
        Tilting parameters (finite).
    rng : numpy.random.Generator
    return_proposals : bool
        Also return the number of proposals consumed.
    """
    c_arr = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c_arr)):
        raise DomainError("tilting parameter must be finite")
    z = 0.5 * np.abs(c_arr).ravel()
    draws, used = _jstar(z, rng)
    draws = 0.25 * draws.reshape(c_arr.shape)
    value = float(draws) if c_arr.ndim == 0 else draws
    return (value, used) if return_proposals else value
