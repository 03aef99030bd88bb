"""Weak-signal binary regression data-generating process.

Each column j has a feature frequency w_j = Beta(a, b) / 2 and entries
x_ij ~ Bernoulli(w_j).  The first ``n_signals`` coefficients equal
``signal_value`` and the rest are zero.  Outcomes have success probability
expit(-(beta_0 + x_i' beta)), so a model fitted with P(y = 1) = expit(x' theta)
recovers theta = -(beta_0, beta).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import ConfigurationError
from .model import Dataset

__all__ = ["SimConfig", "generate_weak_signal_dataset", "model_scale_truth"]


@dataclass(frozen=True)
class SimConfig:
    n: int = 2500
    p: int = 500
    n_signals: int = 10
    signal_value: float = 1.0
    intercept: float = 1.5
    beta_shape_a: float = 0.5
    beta_shape_b: float = 2.0
    seed: int = 0
    add_intercept: bool = True

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ConfigurationError("n and p must be positive")
        if not (0 < self.n_signals <= self.p):
            raise ConfigurationError("need 0 < n_signals <= p")
        if not (self.beta_shape_a > 0 and self.beta_shape_b > 0):
            raise ConfigurationError("Beta shapes must be positive")


@dataclass(frozen=True)
class SimResult:
    dataset: Dataset
    beta_true: np.ndarray
    frequencies: np.ndarray

    def __iter__(self):
        # unpacks as (dataset, beta_true)
        return iter((self.dataset, self.beta_true))


def generate_weak_signal_dataset(config: SimConfig, rng: Optional[np.random.Generator] = None
                                 ) -> SimResult:
    """Simulate a dataset.

    When ``config.add_intercept`` is set, a column of ones is placed at index
    0 of X.  ``beta_true`` has length p and excludes the intercept.
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    n, p = config.n, config.p
    w = 0.5 * rng.beta(config.beta_shape_a, config.beta_shape_b, size=p)
    X = (rng.random((n, p)) < w).astype(float)
    beta = np.zeros(p)
    beta[: config.n_signals] = config.signal_value
    prob = special.expit(-(config.intercept + X @ beta))
    y = (rng.random(n) < prob).astype(float)
    if config.add_intercept:
        X = np.column_stack([np.ones(n), X])
    data = Dataset(X=X, y=y, has_intercept=config.add_intercept)
    beta.setflags(write=False)
    w.setflags(write=False)
    return SimResult(data, beta, w)


def model_scale_truth(beta_true, intercept: Optional[float] = None) -> np.ndarray:
    """Coefficients on the fitted model's scale, intercept first if given."""
    b = -np.asarray(beta_true, dtype=float)
    if intercept is None:
        return b
    return np.concatenate([[-float(intercept)], b])
