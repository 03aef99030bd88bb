from __future__ import annotations

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def ks_distance(draws, cdf):
    """One-sample KS distance for a vectorized CDF callable."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


def grid_cdf(grid, density):
    """Trapezoid CDF for an unnormalized density tabulated on ``grid``."""
    w = np.asarray(density, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (w[1:] + w[:-1]) * np.diff(grid))])
    return cum / cum[-1]


def logistic_1d_posterior_cdf(x, y, prior_var, lo=-8.0, hi=8.0, n=40001):
    """Grid CDF of beta | y for y_i ~ Bernoulli(expit(x_i beta)), beta ~ N(0, prior_var)."""
    from scipy.special import log_expit
    grid = np.linspace(lo, hi, n)
    eta = np.outer(grid, x)
    loglik = (y * log_expit(eta) + (1 - y) * log_expit(-eta)).sum(axis=1)
    lp = loglik - 0.5 * grid ** 2 / prior_var
    dens = np.exp(lp - lp.max())
    return grid, grid_cdf(grid, dens)


def probit_2d_posterior_moments(X, y, prior_var, lim=8.0, n=801):
    """Mean and covariance of a 2-d probit posterior with N(0, diag(prior_var)) prior."""
    from scipy.special import log_ndtr
    g = np.linspace(-lim, lim, n)
    b1, b2 = np.meshgrid(g, g, indexing="ij")
    B = np.stack([b1.ravel(), b2.ravel()], axis=1)
    eta = B @ X.T
    s = 2 * y - 1
    lp = log_ndtr(eta * s).sum(axis=1) - 0.5 * (B ** 2 / prior_var).sum(axis=1)
    w = np.exp(lp - lp.max())
    w /= w.sum()
    mean = w @ B
    C = (B - mean).T @ ((B - mean) * w[:, None])
    return mean, C


ACCEPTANCE_LINES: list = []


def record_criterion(number, title, passed, detail, seconds, limit):
    """Store one summary line; the runtime limit is part of the verdict."""
    ok = bool(passed) and seconds < limit
    ACCEPTANCE_LINES.append(
        f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({detail}; "
        f"{seconds:.1f}s, limit {limit:.0f}s)")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
